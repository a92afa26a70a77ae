use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{count_constrained, BoundParams, CountQuery, CountReport, CountTag};
use crate::error::{Error, Result};
use crate::lattice::FreqVector;
use crate::stats::{loglog_slope, sub_seed};

/// Worst case found per radius, plus the fitted growth exponent of the
/// maximal count in `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub tag: CountTag,
    pub d: usize,
    pub rows: Vec<CountReport>,
    pub slope: Option<f64>,
}

fn box_point<R: Rng>(rng: &mut R, d: usize, half: i64) -> FreqVector {
    let c: Vec<i64> = (0..d).map(|_| rng.random_range(-half..=half)).collect();
    FreqVector::from_slice_unchecked(&c)
}

fn ball_point<R: Rng>(rng: &mut R, center: &FreqVector, radius: f64) -> FreqVector {
    let r2 = (radius * radius).floor() as i64;
    let half = r2.isqrt();
    loop {
        let off = box_point(rng, center.dim(), half);
        if off.norm2() <= r2 {
            return *center + off;
        }
    }
}

/// Two integers with `|a| + |b| <= floor(radius)`.
fn l1_pair<R: Rng>(rng: &mut R, radius: f64) -> (i64, i64) {
    let rf = radius.floor() as i64;
    let a = rng.random_range(-rf..=rf);
    let rest = rf - a.abs();
    (a, rng.random_range(-rest..=rest))
}

fn scalar(x: i64) -> FreqVector {
    FreqVector::from_slice_unchecked(&[x])
}

/// A random query for `tag` with the given radii. `n*` and `mu*` come from a
/// random witness tuple, so the solution set is usually nonempty; half of the
/// time `mu*` is then shifted by a uniform integer of size up to `R^2`.
pub fn sample_query<R: Rng>(tag: CountTag, params: &BoundParams, rng: &mut R) -> Result<CountQuery> {
    let d = params.d;
    let r = params.radius;
    let zero = FreqVector::zero(d);
    let spread = (2.0 * r.max(params.r1).max(params.r2).max(params.r3)).ceil() as i64;
    let mut q = CountQuery::new(tag, d)?
        .with_radius(r)
        .with_radii(params.r1, params.r2, params.r3);
    let sq = |v: &FreqVector| v.norm2();
    let (n_star, mu) = match tag {
        CountTag::NumberA => {
            let n_star = box_point(rng, d, spread);
            let m = ball_point(rng, &zero, r);
            (n_star, sq(&(m - n_star)))
        }
        CountTag::NumberB => {
            let n_star = box_point(rng, d, spread);
            let m = ball_point(rng, &zero, r) - n_star;
            (n_star, m.coord(0).pow(2) + 3 * m.coord(1).pow(2))
        }
        CountTag::C1plus => {
            let n_sub = box_point(rng, 1, spread);
            q = q.with_n_sub(n_sub);
            let (a, b) = l1_pair(rng, r);
            let n1 = n_sub.coord(0) + a;
            let n3 = rng.random_range(-spread..=spread);
            (scalar(n1 + b + n3), n1 * n1 + b * b + n3 * n3)
        }
        CountTag::Cdplus => {
            let n_sub = box_point(rng, d, spread);
            q = q.with_n_sub(n_sub);
            let n1 = ball_point(rng, &n_sub, r);
            let n2 = box_point(rng, d, spread);
            (n1 + n2, sq(&n1) + sq(&n2))
        }
        CountTag::Cdprimeplus => {
            let n1 = ball_point(rng, &zero, params.r1);
            let n2 = ball_point(rng, &zero, params.r2);
            let n3 = box_point(rng, d, spread);
            (n1 + n2 + n3, sq(&n1) + sq(&n2) + sq(&n3))
        }
        CountTag::L1minus1 | CountTag::L1minus2 => {
            let (a, b) = l1_pair(rng, r);
            let free = rng.random_range(-spread..=spread);
            let (n1, n2, n3) = if tag == CountTag::L1minus1 { (a, free, b) } else { (a, b, free) };
            (scalar(n1 - n2 + n3), n1 * n1 - n2 * n2 + n3 * n3)
        }
        CountTag::Ldminus => {
            let n_sub = box_point(rng, d, spread);
            q = q.with_n_sub(n_sub);
            let n1 = ball_point(rng, &n_sub, r);
            let mut n2 = box_point(rng, d, spread);
            while n2 == n1 {
                n2 = box_point(rng, d, spread);
            }
            (n1 - n2, sq(&n1) - sq(&n2))
        }
        CountTag::Ldprime1 | CountTag::Ldprime => {
            let n1 = ball_point(rng, &zero, params.r1);
            let n3 = ball_point(rng, &zero, params.r3);
            let n2 = box_point(rng, d, spread);
            (n1 - n2 + n3, sq(&n1) - sq(&n2) + sq(&n3))
        }
        CountTag::Ldprime2 => {
            let n1 = ball_point(rng, &zero, params.r1);
            let n2 = ball_point(rng, &zero, params.r2);
            let n3 = box_point(rng, d, spread);
            (n1 - n2 + n3, sq(&n1) - sq(&n2) + sq(&n3))
        }
    };
    let mut mu = mu;
    if rng.random_bool(0.5) {
        let span = (r * r).ceil() as i64 + 1;
        mu += rng.random_range(-span..=span);
    }
    Ok(q.with_n_star(n_star).with_mu_star(mu))
}

/// A `NumberA` / `NumberB` query in the sparse regime `mu* > (10R)^6`: the
/// ball `B_R(0)` contains a random point `m` of the quadric and `n*` sits at
/// quadric-distance `sqrt(mu*)` from it.
pub fn jarnik_query<R: Rng>(tag: CountTag, d: usize, radius: f64, rng: &mut R) -> Result<CountQuery> {
    let weights: Vec<i64> = match tag {
        CountTag::NumberA => vec![1; d],
        CountTag::NumberB => vec![1, 3],
        _ => return Err(Error::param(format!("no sparse-regime sampler for {tag}"))),
    };
    let q = CountQuery::new(tag, d)?.with_radius(radius);
    let threshold = (10.0 * radius).powi(6);
    // |v_i| in [L, 2L] with sum_i w_i v_i^2 >= L^2 > threshold
    let lo = threshold.sqrt().ceil() as i64 + 1;
    let zero = FreqVector::zero(d);
    let m = ball_point(rng, &zero, radius);
    let v: Vec<i64> = (0..d)
        .map(|_| {
            let mag = rng.random_range(lo..=2 * lo);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let v = FreqVector::new(&v)?;
    let mu: i64 = (0..d).map(|i| weights[i] * v.coord(i) * v.coord(i)).sum();
    debug_assert!(mu as f64 > threshold);
    let n_star = FreqVector::new((m + v).coords())?;
    Ok(q.with_n_star(n_star).with_mu_star(mu))
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::param("empty radius grid"));
    }
    if let Some(r) = r_grid.iter().find(|r| !(r.is_finite() && **r > 1.0)) {
        return Err(Error::param(format!("grid radius {r} must be finite and exceed 1")));
    }
    Ok(())
}

fn params_for(d: usize, radius: f64) -> BoundParams {
    BoundParams {
        d,
        radius,
        r1: radius,
        r2: radius,
        r3: radius,
    }
}

/// For each `R` in `r_grid`, the largest exact count over `budget` sampled
/// queries with every radius equal to `R`. Bit-identical for any thread count:
/// each sample has its own seed and ties go to the lowest sample index.
pub fn scan_worst_case(
    tag: CountTag,
    d: usize,
    r_grid: &[f64],
    budget: usize,
    seed: u64,
    eta: f64,
) -> Result<ScanReport> {
    check_grid(r_grid)?;
    CountQuery::new(tag, d)?;
    let mut rows = Vec::new();
    if budget > 0 {
        for (gi, &radius) in r_grid.iter().enumerate() {
            let params = params_for(d, radius);
            let reports: Vec<CountReport> = (0..budget)
                .into_par_iter()
                .map(|si| {
                    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, gi as u64, si as u64));
                    count_constrained(&sample_query(tag, &params, &mut rng)?, eta)
                })
                .collect::<Result<_>>()?;
            let best = reports
                .into_iter()
                .reduce(|a, b| if b.exact_count > a.exact_count { b } else { a })
                .expect("budget > 0");
            rows.push(best);
        }
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.query.radius, r.exact_count as f64))
        .collect();
    Ok(ScanReport {
        tag,
        d,
        slope: loglog_slope(&pts),
        rows,
    })
}

/// Every sampled report in the sparse regime, grid-major.
pub fn scan_jarnik(
    tag: CountTag,
    d: usize,
    r_grid: &[f64],
    budget: usize,
    seed: u64,
    eta: f64,
) -> Result<Vec<CountReport>> {
    check_grid(r_grid)?;
    let tasks: Vec<(usize, usize)> = (0..r_grid.len())
        .flat_map(|g| (0..budget).map(move |s| (g, s)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(gi, si)| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed ^ 0x4A41_524E, gi as u64, si as u64));
            count_constrained(&jarnik_query(tag, d, r_grid[gi], &mut rng)?, eta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_and_budget() {
        assert!(scan_worst_case(CountTag::NumberA, 2, &[], 10, 0, 0.25).is_err());
        let r = scan_worst_case(CountTag::NumberA, 2, &[4.0, 8.0], 0, 0, 0.25).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.slope, None);
    }

    #[test]
    fn number_b_growth_is_small() {
        let r = scan_worst_case(CountTag::NumberB, 2, &[4.0, 8.0, 16.0, 32.0], 300, 7, 0.25).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.slope.unwrap() <= 0.6, "slope {:?}", r.slope);
    }

    #[test]
    fn scan_is_deterministic() {
        let a = scan_worst_case(CountTag::Ldprime1, 2, &[3.0, 5.0], 40, 11, 0.25).unwrap();
        let b = scan_worst_case(CountTag::Ldprime1, 2, &[3.0, 5.0], 40, 11, 0.25).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn samplers_hit_nonempty_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for tag in CountTag::ALL {
            let d = if tag.supports_dim(2) { 2 } else { 1 };
            let hits = (0..40)
                .filter(|_| {
                    let q = sample_query(tag, &params_for(d, 4.0), &mut rng).unwrap();
                    super::super::exact_count(&q).unwrap() > 0
                })
                .count();
            assert!(hits > 0, "{tag}");
        }
    }

    #[test]
    fn jarnik_counts_at_most_two() {
        for tag in [CountTag::NumberA, CountTag::NumberB] {
            let reports = scan_jarnik(tag, 2, &[4.0, 8.0], 20, 1, 0.25).unwrap();
            assert!(reports.iter().all(|r| r.exact_count >= 1 && r.exact_count <= 2));
        }
    }
}
