use crate::error::{Error, Result};

const DIVISOR_LIMIT: u64 = 1 << 40;

/// Number of positive divisors of `n`, `1 <= n <= 2^40`, by trial division.
pub fn divisor_count(n: i64) -> Result<u64> {
    if n <= 0 || n as u64 > DIVISOR_LIMIT {
        return Err(Error::param(format!("divisor_count needs 1 <= n <= 2^40, got {n}")));
    }
    let mut n = n as u64;
    let mut count = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        count *= e + 1;
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        count *= 2;
    }
    Ok(count)
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u128, b: u128) -> Result<u128> {
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("lcm({a}, {b}) overflows 128 bits")))
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("{a} * {b} overflows 128 bits")))
}

/// Evaluates `lcm(a,b,c) gcd(a,b) gcd(a,c) gcd(b,c)` and `abc gcd(a,b,c)`
/// exactly and reports whether they agree. `false` means an arithmetic bug.
pub fn lcm_gcd_identity_check(a: u64, b: u64, c: u64) -> Result<bool> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::param("lcm/gcd identity needs positive integers"));
    }
    let (a, b, c) = (a as u128, b as u128, c as u128);
    let lhs = mul(
        mul(mul(lcm(lcm(a, b)?, c)?, gcd(a, b))?, gcd(a, c))?,
        gcd(b, c),
    )?;
    let rhs = mul(mul(mul(a, b)?, c)?, gcd(gcd(a, b), c))?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_divisors(n: i64) -> u64 {
        (1..=n).filter(|m| n % m == 0).count() as u64
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(divisor_count(97).unwrap(), 2);
        assert!(divisor_count(0).is_err());
        assert!(divisor_count(-4).is_err());
        assert!(divisor_count((1 << 40) + 1).is_err());
        assert_eq!(divisor_count(1 << 40).unwrap(), 41);
    }

    #[test]
    fn divisor_matches_naive() {
        for n in 1..2000 {
            assert_eq!(divisor_count(n).unwrap(), naive_divisors(n), "n={n}");
        }
    }

    #[test]
    fn identity_examples() {
        assert!(lcm_gcd_identity_check(1, 1, 1).unwrap());
        assert!(lcm_gcd_identity_check(4, 6, 10).unwrap());
        assert!(lcm_gcd_identity_check(7, 11, 13).unwrap());
        assert!(lcm_gcd_identity_check(0, 1, 1).is_err());
        assert!(matches!(
            lcm_gcd_identity_check(u64::MAX, u64::MAX - 1, u64::MAX - 2),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn identity_hand_values() {
        // lcm(4,6,10) = 60, pairwise gcds 2,2,2: 60 * 8 = 480 = 240 * 2
        assert_eq!(lcm(lcm(4, 6).unwrap(), 10).unwrap(), 60);
    }
}
