use super::CountTag;
use crate::error::{Error, Result};

/// Radii and dimension entering a counting bound. Unused radii are ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub d: usize,
    pub radius: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

/// Right-hand side of the counting lemma named by `tag`, with constant `c`
/// and loss exponent `eta`.
pub fn theoretical_bound(tag: CountTag, params: &BoundParams, eta: f64, c: f64) -> Result<f64> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("eta must be a finite nonnegative number, got {eta}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param(format!("constant C must be positive, got {c}")));
    }
    let d = params.d as f64;
    let check = |r: f64, name: &str| -> Result<f64> {
        if r > 0.0 && r.is_finite() {
            Ok(r)
        } else {
            Err(Error::param(format!("radius {name} = {r} must be positive and finite")))
        }
    };
    use CountTag::*;
    let value = match tag {
        NumberA | Cdplus => check(params.radius, "R")?.powf(d - 2.0 + eta),
        NumberB | C1plus | L1minus1 | L1minus2 => check(params.radius, "R")?.powf(eta),
        Ldminus => check(params.radius, "R")?.powf(d - 1.0),
        Cdprimeplus => {
            let (a, b) = (check(params.r1, "R1")?, check(params.r2, "R2")?);
            a.max(b).powf(d - 2.0 + eta) * a.min(b).powf(d)
        }
        Ldprime1 => {
            let (a, b) = (check(params.r1, "R1")?, check(params.r3, "R3")?);
            a.powf(d - 1.0) * b.powf(d - 1.0) * a.max(b).powf(eta)
        }
        Ldprime2 => {
            let (a, b) = (check(params.r1, "R1")?, check(params.r2, "R2")?);
            a.powf(d - 1.0) * b.powf(d - 1.0) * a.max(b).powf(eta)
        }
        Ldprime => {
            let (a, b) = (check(params.r1, "R1")?, check(params.r3, "R3")?);
            a.max(b).powf(d) * a.min(b).powf(d - 2.0 + eta)
        }
    };
    Ok(c * value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, r: f64, r1: f64, r2: f64, r3: f64) -> BoundParams {
        BoundParams { d, radius: r, r1, r2, r3 }
    }

    #[test]
    fn bound_examples() {
        let b = theoretical_bound(CountTag::NumberA, &params(2, 10.0, 0.0, 0.0, 0.0), 0.25, 1.0).unwrap();
        assert!((b - 10f64.powf(0.25)).abs() < 1e-12);
        assert!((b - 1.778).abs() < 1e-3);
        let b = theoretical_bound(CountTag::Ldminus, &params(2, 10.0, 0.0, 0.0, 0.0), 0.0, 1.0).unwrap();
        assert_eq!(b, 10.0);
        let b = theoretical_bound(CountTag::Ldprime, &params(2, 0.0, 4.0, 0.0, 4.0), 0.0, 1.0).unwrap();
        assert_eq!(b, 16.0);
    }

    #[test]
    fn bound_uses_the_right_radii() {
        let p = params(3, 2.0, 5.0, 3.0, 7.0);
        let b = theoretical_bound(CountTag::Ldprime1, &p, 0.0, 2.0).unwrap();
        assert!((b - 2.0 * 25.0 * 49.0).abs() < 1e-9);
        let b = theoretical_bound(CountTag::Ldprime2, &p, 0.0, 1.0).unwrap();
        assert!((b - 25.0 * 9.0).abs() < 1e-9);
        let b = theoretical_bound(CountTag::Cdprimeplus, &p, 0.0, 1.0).unwrap();
        assert!((b - 5.0 * 27.0).abs() < 1e-9);
    }

    #[test]
    fn bound_validation() {
        let p = params(2, 10.0, 0.0, 0.0, 0.0);
        assert!(theoretical_bound(CountTag::NumberA, &p, -0.1, 1.0).is_err());
        assert!(theoretical_bound(CountTag::NumberA, &p, 0.1, 0.0).is_err());
        assert!(theoretical_bound(CountTag::Ldprime, &p, 0.1, 1.0).is_err());
    }
}
