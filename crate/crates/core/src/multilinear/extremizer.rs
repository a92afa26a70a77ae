use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use super::{check_fields, estimate_ratio, EstimateSpec};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lattice::{box_points, FreqVector};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremizerResult {
    pub best_ratio: f64,
    pub initial_ratio: f64,
    pub accepted: usize,
    pub fields: Vec<SpectralField>,
}

/// Seeded nonnegative fields: each has `min(2B + 1, (2B + 1)^d)` random sites
/// of the box with amplitudes uniform in `[0.1, 1)`.
fn initial_fields(spec: &EstimateSpec, box_radius: i64, rng: &mut ChaCha8Rng) -> Result<Vec<SpectralField>> {
    let pts: Vec<FreqVector> = box_points(spec.d, box_radius).collect();
    let sites = ((2 * box_radius + 1) as usize).min(pts.len());
    (0..2 * spec.k + 1)
        .map(|_| {
            let mut f = SpectralField::new(spec.d, box_radius)?;
            let mut picks = sample(rng, pts.len(), sites).into_vec();
            picks.sort_unstable();
            for i in picks {
                f.insert(pts[i], Complex64::new(rng.random_range(0.1..1.0), 0.0))?;
            }
            Ok(f)
        })
        .collect()
}

/// Hill climb on the estimate ratio: each step rescales one amplitude by a
/// log-normal factor and keeps the move only if the ratio strictly increases.
/// Supports stay fixed. Starts from `start` when given, otherwise from seeded
/// random fields in the box of radius `box_radius`.
pub fn extremizer_search(
    spec: &EstimateSpec,
    box_radius: i64,
    iterations: usize,
    seed: u64,
    start: Option<&[SpectralField]>,
) -> Result<ExtremizerResult> {
    spec.validate()?;
    if box_radius < 0 {
        return Err(Error::param(format!("box radius {box_radius} is negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fields = match start {
        Some(f) => {
            let (d, k) = check_fields(f)?;
            Error::check_dim(spec.d, d)?;
            if k != spec.k {
                return Err(Error::Arity(format!("start has k = {k}, spec has k = {}", spec.k)));
            }
            f.to_vec()
        }
        None => initial_fields(spec, box_radius, &mut rng)?,
    };
    let sites: Vec<Vec<FreqVector>> = fields.iter().map(|f| f.support().copied().collect()).collect();
    let initial_ratio = estimate_ratio(spec, &fields)?;
    let mut best = initial_ratio;
    let mut accepted = 0;
    let step = LogNormal::new(0.0, 0.5).expect("valid log-normal");
    for _ in 0..iterations {
        let l = rng.random_range(0..fields.len());
        if sites[l].is_empty() {
            continue;
        }
        let n = sites[l][rng.random_range(0..sites[l].len())];
        let factor: f64 = step.sample(&mut rng);
        let old = fields[l].get(&n);
        fields[l].set(n, old * factor);
        let ratio = estimate_ratio(spec, &fields)?;
        if ratio > best {
            best = ratio;
            accepted += 1;
        } else {
            fields[l].set(n, old);
        }
    }
    Ok(ExtremizerResult {
        best_ratio: best,
        initial_ratio,
        accepted,
        fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::{counterexample_family, EstimateTag};

    #[test]
    fn zero_iterations_and_determinism() {
        let spec = EstimateSpec::new(EstimateTag::B1, 2, 1, 0.6).unwrap();
        let a = extremizer_search(&spec, 2, 0, 9, None).unwrap();
        assert_eq!(a.best_ratio, a.initial_ratio);
        let b = extremizer_search(&spec, 2, 60, 9, None).unwrap();
        let c = extremizer_search(&spec, 2, 60, 9, None).unwrap();
        assert_eq!(b, c);
        assert_eq!(b.initial_ratio, a.initial_ratio);
        assert!(b.best_ratio >= b.initial_ratio);
    }

    #[test]
    fn injected_start_is_a_floor() {
        let fam = counterexample_family(3).unwrap();
        let spec = EstimateSpec::new(EstimateTag::LinfBlock, 2, 1, 0.25)
            .unwrap()
            .with_q(2)
            .unwrap();
        let base = estimate_ratio(&spec, &fam.fields).unwrap();
        let r = extremizer_search(&spec, 3, 30, 1, Some(&fam.fields)).unwrap();
        assert_eq!(r.initial_ratio, base);
        assert!(r.best_ratio >= base);
    }
}
