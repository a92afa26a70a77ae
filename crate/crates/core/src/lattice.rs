//! Frequency vectors, interaction tuples, the resonance function and the
//! norm-then-lexicographic order on `Z^d`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 4;

/// Largest supported degree parameter `k` (tuples have `2k + 1` entries).
pub const MAX_DEGREE: usize = 7;

/// Largest tuple length, `2 * MAX_DEGREE + 1`.
pub const MAX_ARITY: usize = 2 * MAX_DEGREE + 1;

/// Coordinate bound for user-supplied vectors. Every quadratic quantity built
/// from a bounded tuple stays far inside `i64`.
pub const COORD_BOUND: i64 = 1 << 24;

/// A point of `Z^d`, `1 <= d <= 4`. Unused trailing slots are always zero so
/// the derived `Eq`/`Hash`/`Ord` agree with vector equality.
///
/// The derived `Ord` is a storage order (dimension, then raw coordinates). The
/// order used by the exceptional-set classifier is [`order_compare`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqVector {
    dim: u8,
    coords: [i64; MAX_DIM],
}

impl FreqVector {
    pub fn new(coords: &[i64]) -> Result<Self> {
        let d = coords.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::param(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if let Some(c) = coords.iter().find(|c| c.abs() > COORD_BOUND) {
            return Err(Error::Overflow(format!(
                "coordinate {c} exceeds bound {COORD_BOUND}"
            )));
        }
        Ok(Self::from_slice_unchecked(coords))
    }

    /// Builds a vector without the coordinate bound check. Used for derived
    /// quantities (signed sums, differences) whose size is controlled by the caller.
    pub(crate) fn from_slice_unchecked(coords: &[i64]) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&coords.len()));
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        FreqVector {
            dim: coords.len() as u8,
            coords: c,
        }
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} outside 1..={MAX_DIM}");
        FreqVector {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        }
    }

    /// The `axis`-th unit vector scaled by `value`.
    pub fn axis(dim: usize, axis: usize, value: i64) -> Self {
        let mut v = Self::zero(dim);
        v.coords[axis] = value;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn coord(&self, i: usize) -> i64 {
        self.coords[i]
    }

    /// `|n|^2`.
    #[inline]
    pub fn norm2(&self) -> i64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> i64 {
        self.coords.iter().zip(other.coords.iter()).map(|(a, b)| a * b).sum()
    }

    /// `|n|_inf`.
    #[inline]
    pub fn max_abs(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// `<n>^2 = 1 + |n|^2`, exact.
    #[inline]
    pub fn bracket2(&self) -> i64 {
        1 + self.norm2()
    }

    /// `<n> = (1 + |n|^2)^{1/2}`.
    #[inline]
    pub fn bracket(&self) -> f64 {
        (self.bracket2() as f64).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub(crate) fn check_bound(&self) -> Result<()> {
        if self.max_abs() > COORD_BOUND {
            Err(Error::Overflow(format!(
                "vector {self} exceeds coordinate bound {COORD_BOUND}"
            )))
        } else {
            Ok(())
        }
    }
}

impl Add for FreqVector {
    type Output = FreqVector;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.coords.iter_mut().zip(rhs.coords.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for FreqVector {
    type Output = FreqVector;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.coords.iter_mut().zip(rhs.coords.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for FreqVector {
    type Output = FreqVector;
    #[inline]
    fn neg(mut self) -> Self {
        for a in self.coords.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl fmt::Debug for FreqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FreqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Parses `"1,0"`, `"(1,0)"` or `"3"`.
impl FromStr for FreqVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::param(format!("bad coordinate {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FreqVector::new(&coords)
    }
}

/// The `(2k+1)`-tuple `(n_1, ..., n_{2k+1})`. Entry `l` (1-based) carries the
/// sign `(-1)^{l+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreqTuple {
    entries: Vec<FreqVector>,
}

impl FreqTuple {
    pub fn new(entries: Vec<FreqVector>) -> Result<Self> {
        let len = entries.len();
        if len < 3 || len.is_multiple_of(2) {
            return Err(Error::Arity(format!(
                "tuple length {len} is not of the form 2k+1 with k >= 1"
            )));
        }
        if len > MAX_ARITY {
            return Err(Error::Arity(format!("tuple length {len} exceeds {MAX_ARITY}")));
        }
        let d = entries[0].dim();
        for e in &entries {
            Error::check_dim(d, e.dim())?;
        }
        Ok(FreqTuple { entries })
    }

    pub fn k(&self) -> usize {
        (self.entries.len() - 1) / 2
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    pub fn entries(&self) -> &[FreqVector] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `n_1 - n_2 + ... + n_{2k+1}`.
    pub fn signed_sum(&self) -> FreqVector {
        signed_sum(&self.entries)
    }
}

/// Sign of the 0-based slot `l`: `+1` for even slots, `-1` for odd ones.
#[inline]
pub fn slot_sign(l: usize) -> i64 {
    if l.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[inline]
pub(crate) fn signed_sum(entries: &[FreqVector]) -> FreqVector {
    let mut acc = FreqVector::zero(entries[0].dim());
    for (l, e) in entries.iter().enumerate() {
        acc = if l % 2 == 0 { acc + *e } else { acc - *e };
    }
    acc
}

/// `sum_l (-1)^{l+1} |n_l|^2` over the tuple.
#[inline]
pub(crate) fn signed_quadratic(entries: &[FreqVector]) -> i64 {
    entries
        .iter()
        .enumerate()
        .map(|(l, e)| slot_sign(l) * e.norm2())
        .sum()
}

/// Resonance function `|n|^2 - |n_1|^2 + |n_2|^2 - ... - |n_{2k+1}|^2`.
pub fn phi(n: &FreqVector, t: &FreqTuple) -> Result<i64> {
    Error::check_dim(t.dim(), n.dim())?;
    Ok(phi_unchecked(n, t.entries()))
}

#[inline]
pub(crate) fn phi_unchecked(n: &FreqVector, entries: &[FreqVector]) -> i64 {
    n.norm2() - signed_quadratic(entries)
}

/// Compares by `|.|^2`, then lexicographically on the raw coordinates.
pub fn order_compare(a: &FreqVector, b: &FreqVector) -> Result<Ordering> {
    Error::check_dim(a.dim(), b.dim())?;
    Ok(order_cmp(a, b))
}

#[inline]
pub(crate) fn order_cmp(a: &FreqVector, b: &FreqVector) -> Ordering {
    a.norm2()
        .cmp(&b.norm2())
        .then_with(|| a.coords().cmp(b.coords()))
}

/// Iterates the points of the max-norm box `{|n|_inf <= radius}` in
/// lexicographic order.
pub fn box_points(dim: usize, radius: i64) -> impl Iterator<Item = FreqVector> {
    assert!(radius >= 0);
    let side = (2 * radius + 1) as u64;
    let total = side.pow(dim as u32);
    (0..total).map(move |mut idx| {
        let mut c = [0i64; MAX_DIM];
        for slot in (0..dim).rev() {
            c[slot] = (idx % side) as i64 - radius;
            idx /= side;
        }
        FreqVector::from_slice_unchecked(&c[..dim])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> FreqVector {
        FreqVector::new(c).unwrap()
    }

    #[test]
    fn phi_examples() {
        for m in -5..=5 {
            let t = FreqTuple::new(vec![v(&[3]), v(&[m]), v(&[m])]).unwrap();
            assert_eq!(phi(&v(&[3]), &t).unwrap(), 0);
        }
        let t = FreqTuple::new(vec![v(&[1, 0]), v(&[1, 1]), v(&[0, 1])]).unwrap();
        assert_eq!(phi(&v(&[0, 0]), &t).unwrap(), 0);
        let t = FreqTuple::new(vec![v(&[1]), v(&[0]), v(&[0]), v(&[0]), v(&[0])]).unwrap();
        assert_eq!(phi(&v(&[1]), &t).unwrap(), 0);
    }

    #[test]
    fn phi_dimension_mismatch() {
        let t = FreqTuple::new(vec![v(&[1, 0]), v(&[1, 1]), v(&[0, 1])]).unwrap();
        assert!(matches!(phi(&v(&[0]), &t), Err(Error::Dimension { .. })));
        assert!(FreqTuple::new(vec![v(&[1]), v(&[1, 1]), v(&[0])]).is_err());
    }

    #[test]
    fn tuple_arity() {
        assert!(matches!(
            FreqTuple::new(vec![v(&[1]), v(&[1])]),
            Err(Error::Arity(_))
        ));
        assert!(FreqTuple::new(vec![v(&[1])]).is_err());
    }

    #[test]
    fn order_examples() {
        assert_eq!(order_compare(&v(&[1, 0]), &v(&[0, 1])).unwrap(), Ordering::Greater);
        assert_eq!(order_compare(&v(&[2, 0]), &v(&[1, 1])).unwrap(), Ordering::Greater);
        assert_eq!(order_compare(&v(&[2, -1]), &v(&[2, -1])).unwrap(), Ordering::Equal);
        assert!(order_compare(&v(&[1]), &v(&[1, 0])).is_err());
    }

    #[test]
    fn order_is_total_on_small_boxes() {
        for d in 1..=2 {
            let pts: Vec<_> = box_points(d, 2).collect();
            for a in &pts {
                for b in &pts {
                    let ab = order_cmp(a, b);
                    assert_eq!(ab, order_cmp(b, a).reverse());
                    assert_eq!(ab == Ordering::Equal, a == b);
                    if ab != Ordering::Less {
                        assert!(a.norm2() >= b.norm2());
                    }
                    for c in &pts {
                        if ab != Ordering::Less && order_cmp(b, c) != Ordering::Less {
                            assert_ne!(order_cmp(a, c), Ordering::Less);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coordinate_bound_enforced() {
        assert!(matches!(
            FreqVector::new(&[COORD_BOUND + 1]),
            Err(Error::Overflow(_))
        ));
        assert!(FreqVector::new(&[]).is_err());
        assert!(FreqVector::new(&[0; 5]).is_err());
    }

    #[test]
    fn parse_vectors() {
        assert_eq!("(1,-2)".parse::<FreqVector>().unwrap(), v(&[1, -2]));
        assert_eq!(" 7 ".parse::<FreqVector>().unwrap(), v(&[7]));
        assert!("1,x".parse::<FreqVector>().is_err());
    }

    #[test]
    fn box_points_count() {
        assert_eq!(box_points(2, 1).count(), 9);
        assert_eq!(box_points(1, 3).next().unwrap(), v(&[-3]));
    }
}
