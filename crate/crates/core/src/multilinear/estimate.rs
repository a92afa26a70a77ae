use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{check_fields, resonant_levels, EvalMode, PairTable, Restriction};
use crate::error::{Error, Result};
use crate::field::{in_dyadic_shell, weighted_norm_unchecked, SpectralField};
use crate::lattice::{box_points, FreqVector, MAX_DEGREE, MAX_DIM};

/// Scale-critical exponent `d/2 - 1/k`.
pub fn s_c(d: usize, k: usize) -> f64 {
    d as f64 / 2.0 - 1.0 / k as f64
}

/// Embedding exponent `d(2k-1) / (2(2k+1))`.
pub fn s_e(d: usize, k: usize) -> f64 {
    let (d, k) = (d as f64, k as f64);
    d * (2.0 * k - 1.0) / (2.0 * (2.0 * k + 1.0))
}

/// `eps(k) = 1/2 min{1/(k(2k+1)), 3/5 - 9/16, (2k+3)/(4k(2k+1)), 3/10 - 1/6}`.
pub fn epsilon_k(k: usize) -> f64 {
    let k = k as f64;
    let a = 1.0 / (k * (2.0 * k + 1.0));
    let b = 3.0 / 5.0 - 9.0 / 16.0;
    let c = (2.0 * k + 3.0) / (4.0 * k * (2.0 * k + 1.0));
    let e = 3.0 / 10.0 - 1.0 / 6.0;
    0.5 * a.min(b).min(c).min(e)
}

/// Which row of the `[s1, r, sigma]` table applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamRegime {
    /// `d >= 2 + 2/k`
    HighDim,
    /// `d in {1, 2}`, `k >= 2`
    LowDim,
    /// `d in {2, 3}`, `k = 1`
    Cubic,
}

impl ParamRegime {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) || !(1..=MAX_DEGREE).contains(&k) {
            return Err(Error::param(format!("(d, k) = ({d}, {k}) out of range")));
        }
        if (d, k) == (1, 1) {
            return Err(Error::UnsupportedCase("no estimates for (d, k) = (1, 1)".into()));
        }
        Ok(if d * k >= 2 * k + 2 {
            ParamRegime::HighDim
        } else if k == 1 {
            ParamRegime::Cubic
        } else {
            ParamRegime::LowDim
        })
    }

    /// `[s1, r, sigma]` for regularity `s`.
    pub fn table(self, d: usize, k: usize, s: f64) -> (f64, f64, f64) {
        let sc = s_c(d, k);
        match self {
            ParamRegime::HighDim => ((s + sc) / 2.0, 2.0, -sc),
            ParamRegime::LowDim => (((s + sc) / 2.0).max(s_e(d, k) - epsilon_k(k) / 2.0), f64::INFINITY, 0.0),
            ParamRegime::Cubic => {
                let d = d as f64;
                (
                    (s + (3.0 * d - 2.0) / 10.0) / 2.0,
                    10.0 / (2.0 * d - 3.0),
                    -(2.0 * d - 3.0) * (d - 2.0) / 10.0,
                )
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimateTag {
    B1,
    B1prime,
    REst,
    B2,
    B2prime,
    B3,
    DyadicBlock,
    LinfBlock,
}

impl EstimateTag {
    pub const ALL: [EstimateTag; 8] = [
        EstimateTag::B1,
        EstimateTag::B1prime,
        EstimateTag::REst,
        EstimateTag::B2,
        EstimateTag::B2prime,
        EstimateTag::B3,
        EstimateTag::DyadicBlock,
        EstimateTag::LinfBlock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimateTag::B1 => "B1",
            EstimateTag::B1prime => "B1prime",
            EstimateTag::REst => "R_est",
            EstimateTag::B2 => "B2",
            EstimateTag::B2prime => "B2prime",
            EstimateTag::B3 => "B3",
            EstimateTag::DyadicBlock => "DyadicBlock",
            EstimateTag::LinfBlock => "LinfBlock",
        }
    }

    /// The tuple restriction on the left-hand side.
    pub fn restriction(self) -> Restriction {
        match self {
            EstimateTag::B1 | EstimateTag::B1prime | EstimateTag::DyadicBlock => Restriction::None,
            EstimateTag::REst => Restriction::OnA,
            EstimateTag::B2 | EstimateTag::B2prime | EstimateTag::B3 | EstimateTag::LinfBlock => Restriction::OnAc,
        }
    }

    /// Whether the left-hand side is a supremum over resonance levels.
    pub fn sup_over_levels(self) -> bool {
        matches!(
            self,
            EstimateTag::B1 | EstimateTag::B2 | EstimateTag::DyadicBlock | EstimateTag::LinfBlock
        )
    }
}

impl fmt::Display for EstimateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimateTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let alias = match t {
            "B1'" => Some(EstimateTag::B1prime),
            "B2'" => Some(EstimateTag::B2prime),
            "R" => Some(EstimateTag::REst),
            _ => None,
        };
        alias
            .or_else(|| EstimateTag::ALL.iter().copied().find(|e| e.name().eq_ignore_ascii_case(t)))
            .ok_or_else(|| Error::param(format!("unknown estimate tag {s:?}")))
    }
}

/// One estimate with its exponents. `q` is 1-based; `None` minimizes the
/// right-hand side over `q`. `mu`, when set, replaces the supremum over
/// levels by that single level.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateSpec {
    pub tag: EstimateTag,
    pub d: usize,
    pub k: usize,
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
    pub r: f64,
    pub sigma: f64,
    pub q: Option<usize>,
    pub mu: Option<i64>,
    pub restriction: Restriction,
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl EstimateSpec {
    /// Derives `s1`, `s2 = max(d/2, s) + 1`, `r` and `sigma` from `(d, k, s)`.
    pub fn new(tag: EstimateTag, d: usize, k: usize, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::param(format!("regularity s = {s} is not finite")));
        }
        let regime = ParamRegime::new(d, k)?;
        let (s1, r, sigma) = regime.table(d, k, s);
        Ok(EstimateSpec {
            tag,
            d,
            k,
            s,
            s1,
            s2: (d as f64 / 2.0).max(s) + 1.0,
            r,
            sigma,
            q: None,
            mu: None,
            restriction: tag.restriction(),
        })
    }

    pub fn regime(&self) -> Result<ParamRegime> {
        ParamRegime::new(self.d, self.k)
    }

    pub fn with_q(mut self, q: usize) -> Result<Self> {
        if !(1..=2 * self.k + 1).contains(&q) {
            return Err(Error::param(format!("q = {q} outside 1..={}", 2 * self.k + 1)));
        }
        self.q = Some(q);
        Ok(self)
    }

    pub fn with_mu(mut self, mu: i64) -> Self {
        self.mu = Some(mu);
        self
    }

    /// Accepts hand-set `[s1, r, sigma]` only if they agree with the table.
    pub fn with_table(self, s1: f64, r: f64, sigma: f64) -> Result<Self> {
        if close(s1, self.s1) && close(r, self.r) && close(sigma, self.sigma) {
            Ok(self)
        } else {
            Err(Error::param(format!(
                "[s1, r, sigma] = [{s1}, {r}, {sigma}] disagrees with the derived [{}, {}, {}]",
                self.s1, self.r, self.sigma
            )))
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fresh = EstimateSpec::new(self.tag, self.d, self.k, self.s)?;
        fresh.clone().with_table(self.s1, self.r, self.sigma)?;
        if !close(self.s2, fresh.s2) {
            return Err(Error::param(format!("s2 = {} disagrees with max(d/2, s) + 1", self.s2)));
        }
        if self.restriction != self.tag.restriction() {
            return Err(Error::param(format!("{} requires restriction {:?}", self.tag, self.tag.restriction())));
        }
        if let Some(q) = self.q {
            if !(1..=2 * self.k + 1).contains(&q) {
                return Err(Error::param(format!("q = {q} outside 1..={}", 2 * self.k + 1)));
            }
        }
        Ok(())
    }
}

fn norm(f: &SpectralField, p: f64, s: f64) -> f64 {
    weighted_norm_unchecked(f.iter().map(|(n, v)| (n, v.norm())), p, s)
}

/// `min over q` (or the chosen `q`) of `||w_q||_{p_q, s_q} prod_{l != q} ||w_l||_{2, s_rest}`.
fn distinguished_product(fields: &[SpectralField], q: Option<usize>, p_q: f64, s_q: f64, s_rest: f64) -> f64 {
    let rest: Vec<f64> = fields.iter().map(|f| norm(f, 2.0, s_rest)).collect();
    let term = |q: usize| {
        norm(&fields[q], p_q, s_q) * rest.iter().enumerate().filter(|(l, _)| *l != q).map(|(_, x)| x).product::<f64>()
    };
    match q {
        Some(q) => term(q - 1),
        None => (0..fields.len()).map(term).fold(f64::INFINITY, f64::min),
    }
}

/// Left-hand side over right-hand side of the estimate named by `spec`.
pub fn estimate_ratio(spec: &EstimateSpec, fields: &[SpectralField]) -> Result<f64> {
    spec.validate()?;
    let (d, k) = check_fields(fields)?;
    if k != spec.k {
        return Err(Error::Arity(format!("spec has k = {}, fields give k = {k}", spec.k)));
    }
    Error::check_dim(spec.d, d)?;
    let levels = resonant_levels(fields, spec.restriction, EvalMode::PairTable)?;
    let mu = if spec.tag.sup_over_levels() { spec.mu } else { None };
    let (lhs, rhs) = match spec.tag {
        EstimateTag::B1 => (
            levels.sup_level_norm(2.0, spec.s1, mu),
            fields.iter().map(|f| norm(f, 2.0, spec.s1)).product::<f64>(),
        ),
        EstimateTag::B1prime => (
            levels.total_norm(2.0, spec.s2),
            fields.iter().map(|f| norm(f, 2.0, spec.s2)).product(),
        ),
        EstimateTag::REst => (
            levels.total_norm(2.0, spec.s),
            fields.iter().map(|f| norm(f, 2.0, spec.s)).product(),
        ),
        EstimateTag::B2 => (
            levels.sup_level_norm(spec.r, spec.sigma, mu),
            distinguished_product(fields, spec.q, spec.r, spec.sigma, spec.s1),
        ),
        EstimateTag::B2prime => (
            levels.total_norm(spec.r, spec.sigma),
            distinguished_product(fields, spec.q, spec.r, spec.sigma, spec.s2),
        ),
        EstimateTag::B3 => (
            levels.total_norm(spec.r, spec.sigma),
            fields.iter().map(|f| norm(f, 2.0, spec.s)).product(),
        ),
        EstimateTag::DyadicBlock => (
            levels.sup_level_norm(2.0, spec.s1, mu),
            distinguished_product(fields, spec.q, 2.0, spec.s1, spec.s),
        ),
        EstimateTag::LinfBlock => (
            levels.sup_level_norm(f64::INFINITY, 0.0, mu),
            distinguished_product(fields, spec.q, f64::INFINITY, 0.0, spec.s),
        ),
    };
    if !(rhs > 0.0 && rhs.is_finite()) {
        return Err(Error::DegenerateInput(format!("right-hand side of {} is {rhs}", spec.tag)));
    }
    Ok(lhs / rhs)
}

/// Fields on which the `l^inf` estimate with `d = 2, k = 1` fails for `s < 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub fields: Vec<SpectralField>,
    /// 1-based distinguished slot.
    pub q: usize,
    pub mu: i64,
    pub n: FreqVector,
}

/// `w_1 = 1{(a,0): |a| <= N}`, `w_2 = 1{max(|a|,|b|) <= N}`, `w_3 = 1{(0,b): |b| <= N}`.
pub fn counterexample_family(big_n: i64) -> Result<Counterexample> {
    if big_n < 1 {
        return Err(Error::param(format!("N = {big_n} must be at least 1")));
    }
    let axis = |i: usize| (-big_n..=big_n).map(move |a| FreqVector::axis(2, i, a));
    Ok(Counterexample {
        fields: vec![
            SpectralField::indicator(2, big_n, axis(0))?,
            SpectralField::indicator(2, big_n, box_points(2, big_n))?,
            SpectralField::indicator(2, big_n, axis(1))?,
        ],
        q: 2,
        mu: 0,
        n: FreqVector::zero(2),
    })
}

fn check_block(shells: &[i64], s: f64, fields: &[SpectralField]) -> Result<(usize, usize)> {
    if shells.len() != fields.len() || fields.len() < 4 || !fields.len().is_multiple_of(2) {
        return Err(Error::Arity(format!(
            "need 2k + 2 >= 4 shells and fields, got {} and {}",
            shells.len(),
            fields.len()
        )));
    }
    let k = (fields.len() - 2) / 2;
    let d = fields[0].dim();
    ParamRegime::new(d, k)?;
    if s.is_nan() || s <= s_c(d, k) {
        return Err(Error::param(format!("s = {s} must exceed s_c = {}", s_c(d, k))));
    }
    for (l, (f, &big_n)) in fields.iter().zip(shells).enumerate() {
        Error::check_dim(d, f.dim())?;
        if !(big_n >= 1 && (big_n as u64).is_power_of_two()) {
            return Err(Error::param(format!("shell {big_n} is not dyadic")));
        }
        for (n, v) in f.iter() {
            if !in_dyadic_shell(n, big_n) {
                return Err(Error::Precondition(format!("field {l} has {n} outside shell {big_n}")));
            }
            if v.im != 0.0 || v.re < 0.0 {
                return Err(Error::Precondition(format!("field {l} is not nonnegative at {n}")));
            }
        }
    }
    Ok((d, k))
}

fn block_bound(shells: &[i64], s: f64, fields: &[SpectralField]) -> f64 {
    let n_max = *shells.iter().max().expect("nonempty") as f64;
    n_max.powf(-2.0 * s)
        * shells
            .iter()
            .zip(fields)
            .map(|(&big_n, f)| (big_n as f64).powf(s) * norm(f, 2.0, 0.0))
            .product::<f64>()
}

/// Per-level values of the `(2k+2)`-linear form, joining the slot halves
/// `0..=k` and `k+1..=2k+1` on `v_L + v_R = 0`; the level is `q_L + q_R`.
fn block_levels(fields: &[SpectralField], k: usize, mu: Option<i64>) -> HashMap<i64, f64> {
    let left = PairTable::build(fields, 0..k + 1, false);
    let right = PairTable::build(fields, k + 1..2 * k + 2, false);
    let mut per_level: HashMap<i64, f64> = HashMap::new();
    for li in 0..left.len() {
        let (vl, ql) = left.key(li);
        let cands = match mu {
            Some(m) => right.with_key(&-vl, m - ql),
            None => right.with_vector(&-vl),
        };
        for &ri in cands {
            let (_, qr) = right.key(ri as usize);
            *per_level.entry(ql + qr).or_default() += (left.amp(li) * right.amp(ri as usize)).re;
        }
    }
    per_level
}

/// `(lhs, bound)`: the `(2k+2)`-linear sum over
/// `n_0 - n_1 + ... - n_{2k+1} = 0`, `|n_0|^2 - |n_1|^2 + ... - |n_{2k+1}|^2 = mu`,
/// and `N_max^{-2s} prod_l N_l^s ||w_l||_{l^2}`.
pub fn dyadic_block_check(shells: &[i64], mu: i64, s: f64, fields: &[SpectralField]) -> Result<(f64, f64)> {
    let (_, k) = check_block(shells, s, fields)?;
    let lhs = block_levels(fields, k, Some(mu)).get(&mu).copied().unwrap_or(0.0);
    Ok((lhs, block_bound(shells, s, fields)))
}

/// The level `mu` maximizing the block sum, with `(lhs, bound)` there.
/// Returns `mu = 0`, `lhs = 0` when no level is attained.
pub fn dyadic_block_worst(shells: &[i64], s: f64, fields: &[SpectralField]) -> Result<(i64, f64, f64)> {
    let (_, k) = check_block(shells, s, fields)?;
    let (mu, lhs) = block_levels(fields, k, None)
        .into_iter()
        .fold((0, 0.0), |best, (mu, x)| if x > best.1 || (x == best.1 && mu < best.0) { (mu, x) } else { best });
    Ok((mu, lhs, block_bound(shells, s, fields)))
}
