//! Exact lattice-point counters for the counting lemmas, their closed-form
//! bounds, and worst-case scans.
//!
//! Every counter enumerates only the variables that are confined to balls and
//! solves the remaining constraints exactly (linear ones directly, quadratic
//! ones through an integer square root or a divisor relation). Counts are
//! exact integers; only the bound and the ratio are floating point.

mod arith;
mod ball;
mod bounds;
mod scan;

use std::fmt;
use std::str::FromStr;

pub use arith::{divisor_count, gcd, lcm_gcd_identity_check};
pub use ball::{enumerate_ball, BallIter};
pub use bounds::{theoretical_bound, BoundParams};
pub use scan::{jarnik_query, sample_query, scan_jarnik, scan_worst_case, ScanReport};

use crate::error::{Error, Result};
use crate::lattice::FreqVector;
use ball::{ball_r2, for_each_on_hyperplane, for_each_on_quadric};

/// Names one counting statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CountTag {
    /// `#{n in B_R : |n - n*|^2 = mu*}`
    NumberA,
    /// `#{(p,q) in B_R : (p-p*)^2 + 3(q-q*)^2 = mu*}`
    NumberB,
    /// d = 1: `n1+n2+n3 = n*`, `n1^2+n2^2+n3^2 = mu*`, `|n1-n_*|+|n2| <= R`
    C1plus,
    /// `n1+n2 = n*`, `|n1|^2+|n2|^2 = mu*`, `|n1-n_*| <= R`
    Cdplus,
    /// `n1+n2+n3 = n*`, `|n1|^2+|n2|^2+|n3|^2 = mu*`, `|n1| <= R1`, `|n2| <= R2`
    Cdprimeplus,
    /// d = 1: `n1-n2+n3 = n*`, `n1^2-n2^2+n3^2 = mu*`, `n2 != n1, n3`, `|n1|+|n3| <= R`
    L1minus1,
    /// d = 1: as `L1minus1` with `|n1|+|n2| <= R`
    L1minus2,
    /// `n1-n2 = n* != 0`, `|n1|^2-|n2|^2 = mu*`, `|n1-n_*| <= R`
    Ldminus,
    /// `n1-n2+n3 = n*`, `|n1|^2-|n2|^2+|n3|^2 = mu*`, `n2 != n1, n3`, `|n1| <= R1`, `|n3| <= R3`
    Ldprime1,
    /// as `Ldprime1` with `|n1| <= R1`, `|n2| <= R2`
    Ldprime2,
    /// as `Ldprime1` without the exclusions `n2 != n1, n3`
    Ldprime,
}

impl CountTag {
    pub const ALL: [CountTag; 11] = [
        CountTag::NumberA,
        CountTag::NumberB,
        CountTag::C1plus,
        CountTag::Cdplus,
        CountTag::Cdprimeplus,
        CountTag::L1minus1,
        CountTag::L1minus2,
        CountTag::Ldminus,
        CountTag::Ldprime1,
        CountTag::Ldprime2,
        CountTag::Ldprime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CountTag::NumberA => "NumberA",
            CountTag::NumberB => "NumberB",
            CountTag::C1plus => "C1plus",
            CountTag::Cdplus => "Cdplus",
            CountTag::Cdprimeplus => "Cdprimeplus",
            CountTag::L1minus1 => "L1minus1",
            CountTag::L1minus2 => "L1minus2",
            CountTag::Ldminus => "Ldminus",
            CountTag::Ldprime1 => "Ldprime1",
            CountTag::Ldprime2 => "Ldprime2",
            CountTag::Ldprime => "Ldprime",
        }
    }

    /// Dimensions the statement is made for.
    pub fn supports_dim(self, d: usize) -> bool {
        match self {
            CountTag::NumberB => d == 2,
            CountTag::C1plus | CountTag::L1minus1 | CountTag::L1minus2 => d == 1,
            _ => (2..=crate::lattice::MAX_DIM).contains(&d),
        }
    }

    /// Which radii the statement uses: `(R, R1, R2, R3)`.
    pub fn radii_used(self) -> (bool, bool, bool, bool) {
        match self {
            CountTag::Cdprimeplus | CountTag::Ldprime2 => (false, true, true, false),
            CountTag::Ldprime1 | CountTag::Ldprime => (false, true, false, true),
            _ => (true, false, false, false),
        }
    }
}

impl fmt::Display for CountTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CountTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CountTag::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown counting lemma {s:?}")))
    }
}

/// A counting request. Fields a tag does not use are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct CountQuery {
    pub tag: CountTag,
    pub d: usize,
    /// `n*` (for `NumberB`, the point `(p*, q*)`).
    pub n_star: FreqVector,
    /// `n_*`, the center of the constraining ball for `C1plus`, `Cdplus`, `Ldminus`.
    pub n_sub: FreqVector,
    pub mu_star: i64,
    pub radius: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    /// Center of `B_R` for `NumberA` / `NumberB`.
    pub ball_center: FreqVector,
}

impl CountQuery {
    /// A query with zero centers and `mu* = 0`; radii must still be set.
    pub fn new(tag: CountTag, d: usize) -> Result<Self> {
        if !tag.supports_dim(d) {
            return Err(Error::param(format!("{tag} is not defined in dimension {d}")));
        }
        let zero = FreqVector::zero(d);
        Ok(CountQuery {
            tag,
            d,
            n_star: zero,
            n_sub: zero,
            mu_star: 0,
            radius: 0.0,
            r1: 0.0,
            r2: 0.0,
            r3: 0.0,
            ball_center: zero,
        })
    }

    pub fn with_n_star(mut self, v: FreqVector) -> Self {
        self.n_star = v;
        self
    }

    pub fn with_n_sub(mut self, v: FreqVector) -> Self {
        self.n_sub = v;
        self
    }

    pub fn with_mu_star(mut self, mu: i64) -> Self {
        self.mu_star = mu;
        self
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.radius = r;
        self
    }

    pub fn with_radii(mut self, r1: f64, r2: f64, r3: f64) -> Self {
        self.r1 = r1;
        self.r2 = r2;
        self.r3 = r3;
        self
    }

    pub fn with_ball_center(mut self, c: FreqVector) -> Self {
        self.ball_center = c;
        self
    }

    pub fn bound_params(&self) -> BoundParams {
        BoundParams {
            d: self.d,
            radius: self.radius,
            r1: self.r1,
            r2: self.r2,
            r3: self.r3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tag.supports_dim(self.d) {
            return Err(Error::param(format!("{} is not defined in dimension {}", self.tag, self.d)));
        }
        for v in [&self.n_star, &self.n_sub, &self.ball_center] {
            Error::check_dim(self.d, v.dim())?;
            v.check_bound()?;
        }
        let (r, r1, r2, r3) = self.tag.radii_used();
        for (used, value, name) in [(r, self.radius, "R"), (r1, self.r1, "R1"), (r2, self.r2, "R2"), (r3, self.r3, "R3")] {
            if !used {
                continue;
            }
            if !value.is_finite() {
                return Err(Error::Query(format!(
                    "radius {name} = {value} leaves the enumeration unbounded"
                )));
            }
            if value <= 1.0 {
                return Err(Error::param(format!("radius {name} = {value} must exceed 1")));
            }
        }
        if self.tag == CountTag::Ldminus && self.n_star.is_zero() {
            return Err(Error::Precondition("Ldminus requires n* != 0".into()));
        }
        Ok(())
    }
}

/// Exact count, bound value and their ratio for one query.
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub query: CountQuery,
    pub exact_count: u64,
    pub bound_value: f64,
    pub ratio: f64,
}

/// Exact solution count for `q` alongside the lemma's bound with `C = 1`.
pub fn count_constrained(q: &CountQuery, eta: f64) -> Result<CountReport> {
    let exact_count = exact_count(q)?;
    let bound_value = theoretical_bound(q.tag, &q.bound_params(), eta, 1.0)?;
    let ratio = if bound_value > 0.0 {
        exact_count as f64 / bound_value
    } else {
        f64::NAN
    };
    Ok(CountReport {
        query: q.clone(),
        exact_count,
        bound_value,
        ratio,
    })
}

/// The exact count alone.
pub fn exact_count(q: &CountQuery) -> Result<u64> {
    q.validate()?;
    let zero = FreqVector::zero(q.d);
    let ones = [1i64; crate::lattice::MAX_DIM];
    let mut count = 0u64;
    match q.tag {
        CountTag::NumberA => {
            let r2 = ball_r2(&q.ball_center, q.radius)?;
            for_each_on_quadric(&q.ball_center, r2, 1, &q.n_star, &ones[..q.d], q.mu_star, |_| {
                count += 1
            });
        }
        CountTag::NumberB => {
            let r2 = ball_r2(&q.ball_center, q.radius)?;
            for_each_on_quadric(&q.ball_center, r2, 1, &q.n_star, &[1, 3], q.mu_star, |_| count += 1);
        }
        CountTag::C1plus => count = count_c1plus(q)?,
        CountTag::L1minus1 | CountTag::L1minus2 => count = count_l1minus(q)?,
        CountTag::Cdplus => {
            let r2 = ball_r2(&q.n_sub, q.radius)?;
            if let Ok(rho) = (2 * q.mu_star as i128 - q.n_star.norm2() as i128).try_into() {
                for_each_on_quadric(&q.n_sub, r2, 2, &q.n_star, &ones[..q.d], rho, |_| count += 1);
            }
        }
        CountTag::Ldminus => {
            let r2 = ball_r2(&q.n_sub, q.radius)?;
            let num = q.mu_star as i128 + q.n_star.norm2() as i128;
            if num % 2 == 0 {
                if let Ok(level) = i64::try_from(num / 2) {
                    for_each_on_hyperplane(&q.n_sub, r2, &q.n_star, level, |_| count += 1);
                }
            }
        }
        CountTag::Cdprimeplus => {
            let r2_outer = ball_r2(&zero, q.r2)?;
            for n1 in enumerate_ball(q.d, &zero, q.r1)? {
                let m = q.n_star - n1;
                let nu = q.mu_star as i128 - n1.norm2() as i128;
                let rho = 2 * nu - m.norm2() as i128;
                if let Ok(rho) = i64::try_from(rho) {
                    for_each_on_quadric(&zero, r2_outer, 2, &m, &ones[..q.d], rho, |_| count += 1);
                }
            }
        }
        CountTag::Ldprime1 | CountTag::Ldprime => {
            let exclude = q.tag == CountTag::Ldprime1;
            let r3 = ball_r2(&zero, q.r3)?;
            for n1 in enumerate_ball(q.d, &zero, q.r1)? {
                // n2 = n3 + m
                let m = n1 - q.n_star;
                let num = n1.norm2() as i128 - m.norm2() as i128 - q.mu_star as i128;
                if m.is_zero() {
                    if !exclude && num == 0 {
                        count += BallIter::new(zero, r3).count() as u64;
                    }
                    continue;
                }
                if num % 2 != 0 {
                    continue;
                }
                let Ok(level) = i64::try_from(num / 2) else { continue };
                for_each_on_hyperplane(&zero, r3, &m, level, |n3| {
                    if !exclude || n3 + m != n1 {
                        count += 1;
                    }
                });
            }
        }
        CountTag::Ldprime2 => {
            let r2 = ball_r2(&zero, q.r2)?;
            for n1 in enumerate_ball(q.d, &zero, q.r1)? {
                // n3 = n2 + m; m = 0 forces n3 = n2, which is excluded
                let m = q.n_star - n1;
                if m.is_zero() {
                    continue;
                }
                let num = q.mu_star as i128 - n1.norm2() as i128 - m.norm2() as i128;
                if num % 2 != 0 {
                    continue;
                }
                let Ok(level) = i64::try_from(num / 2) else { continue };
                for_each_on_hyperplane(&zero, r2, &m, level, |n2| {
                    if n2 != n1 {
                        count += 1;
                    }
                });
            }
        }
    }
    Ok(count)
}

fn radius_floor(r: f64) -> Result<i64> {
    let f = r.floor();
    if f > crate::lattice::COORD_BOUND as f64 {
        return Err(Error::Overflow(format!("radius {r} exceeds the coordinate range")));
    }
    Ok(f as i64)
}

/// Solves the quadratic for `n2` given `n1`.
fn count_c1plus(q: &CountQuery) -> Result<u64> {
    let rf = radius_floor(q.radius)?;
    let n_star = q.n_star.coord(0) as i128;
    let center = q.n_sub.coord(0) as i128;
    let mu = q.mu_star as i128;
    let mut count = 0u64;
    for off in -rf..=rf {
        let n1 = center + off as i128;
        let budget = (rf - off.abs()) as i128;
        let a = n_star - n1;
        // n2 = (a +- sqrt(2 mu - 2 n1^2 - a^2)) / 2
        let disc = 2 * mu - 2 * n1 * n1 - a * a;
        if disc < 0 {
            continue;
        }
        let t = disc.isqrt();
        if t * t != disc {
            continue;
        }
        let roots: &[i128] = if t == 0 { &[0] } else { &[-t, t] };
        for &r in roots {
            let num = a + r;
            if num % 2 == 0 && (num / 2).abs() <= budget {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Uses `(n* - n1)(n* - n3) = mu**` (first variant) or
/// `(n* - n1)(n1 - n2) = mu**` (second), `mu** = (n*^2 - mu*)/2`; both
/// factors are nonzero exactly when the exclusions hold.
fn count_l1minus(q: &CountQuery) -> Result<u64> {
    let rf = radius_floor(q.radius)? as i128;
    let n_star = q.n_star.coord(0) as i128;
    let num = n_star * n_star - q.mu_star as i128;
    if num % 2 != 0 || num == 0 {
        return Ok(0);
    }
    let target = num / 2;
    let mut count = 0u64;
    for n1 in -rf..=rf {
        let a = n_star - n1;
        if a == 0 || target % a != 0 {
            continue;
        }
        let b = target / a;
        let partner = if q.tag == CountTag::L1minus1 {
            n_star - b // n3
        } else {
            n1 - b // n2
        };
        if n1.abs() + partner.abs() <= rf {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> FreqVector {
        FreqVector::new(c).unwrap()
    }

    #[test]
    fn number_a_examples() {
        let q = CountQuery::new(CountTag::NumberA, 2).unwrap().with_mu_star(25).with_radius(6.0);
        assert_eq!(count_constrained(&q, 0.25).unwrap().exact_count, 12);
        let q = q.with_mu_star(-1);
        assert_eq!(exact_count(&q).unwrap(), 0);
    }

    #[test]
    fn number_b_example() {
        let q = CountQuery::new(CountTag::NumberB, 2).unwrap().with_mu_star(4).with_radius(3.0);
        assert_eq!(exact_count(&q).unwrap(), 6);
    }

    #[test]
    fn ldminus_example() {
        let q = CountQuery::new(CountTag::Ldminus, 2)
            .unwrap()
            .with_n_star(v(&[1, 0]))
            .with_mu_star(1)
            .with_radius(5.0);
        assert_eq!(exact_count(&q).unwrap(), 9);
        let bad = q.clone().with_n_star(v(&[0, 0]));
        assert!(matches!(exact_count(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn query_validation() {
        let q = CountQuery::new(CountTag::NumberA, 2).unwrap().with_radius(f64::INFINITY);
        assert!(matches!(exact_count(&q), Err(Error::Query(_))));
        let q = CountQuery::new(CountTag::NumberA, 2).unwrap().with_radius(1.0);
        assert!(matches!(exact_count(&q), Err(Error::Parameter(_))));
        assert!(CountQuery::new(CountTag::NumberB, 3).is_err());
        assert!(CountQuery::new(CountTag::C1plus, 2).is_err());
        let q = CountQuery::new(CountTag::Ldprime, 2).unwrap().with_radius(5.0);
        assert!(exact_count(&q).is_err(), "R1/R3 unset");
    }

    #[test]
    fn report_ratio() {
        let q = CountQuery::new(CountTag::Ldminus, 2)
            .unwrap()
            .with_n_star(v(&[1, 0]))
            .with_mu_star(1)
            .with_radius(5.0);
        let r = count_constrained(&q, 0.0).unwrap();
        assert_eq!(r.bound_value, 5.0);
        assert_eq!(r.ratio, 9.0 / 5.0);
    }

    #[test]
    fn tag_names_round_trip() {
        for t in CountTag::ALL {
            assert_eq!(t.name().parse::<CountTag>().unwrap(), t);
        }
        assert!("bogus".parse::<CountTag>().is_err());
    }

    #[test]
    fn number_a_translation_invariance() {
        let base = CountQuery::new(CountTag::NumberA, 2).unwrap().with_mu_star(65).with_radius(7.5);
        let c0 = exact_count(&base).unwrap();
        for shift in [v(&[3, -4]), v(&[-100, 17]), v(&[1, 1])] {
            let q = base
                .clone()
                .with_n_star(base.n_star + shift)
                .with_ball_center(base.ball_center + shift);
            assert_eq!(exact_count(&q).unwrap(), c0);
        }
    }
}
