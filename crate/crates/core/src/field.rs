//! Finitely supported sequences `Z^d -> C`, weighted norms and dyadic shells.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{box_points, FreqVector, COORD_BOUND, MAX_DIM};

/// A finitely supported map `Z^d -> C` living in the box `{|n|_inf <= box_radius}`.
///
/// Exact zeros are never stored, so two fields compare equal iff they agree
/// pointwise.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    dim: usize,
    box_radius: i64,
    values: BTreeMap<FreqVector, Complex64>,
}

impl SpectralField {
    pub fn new(dim: usize, box_radius: i64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::param(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        if !(0..=COORD_BOUND).contains(&box_radius) {
            return Err(Error::param(format!("box radius {box_radius} out of range")));
        }
        Ok(SpectralField {
            dim,
            box_radius,
            values: BTreeMap::new(),
        })
    }

    /// Unit mass (times `amp`) at `n`, in the smallest box containing it.
    pub fn delta(n: FreqVector, amp: Complex64) -> Self {
        let mut f = SpectralField {
            dim: n.dim(),
            box_radius: n.max_abs(),
            values: BTreeMap::new(),
        };
        f.set(n, amp);
        f
    }

    /// Indicator of `points`, in the given box.
    pub fn indicator<I>(dim: usize, box_radius: i64, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = FreqVector>,
    {
        let mut f = SpectralField::new(dim, box_radius)?;
        for p in points {
            f.insert(p, Complex64::new(1.0, 0.0))?;
        }
        Ok(f)
    }

    /// Samples `g` over every point of the box.
    pub fn from_fn(dim: usize, box_radius: i64, mut g: impl FnMut(&FreqVector) -> Complex64) -> Result<Self> {
        let mut f = SpectralField::new(dim, box_radius)?;
        for p in box_points(dim, box_radius) {
            let v = g(&p);
            f.set(p, v);
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_radius(&self) -> i64 {
        self.box_radius
    }

    pub fn contains_point(&self, n: &FreqVector) -> bool {
        n.dim() == self.dim && n.max_abs() <= self.box_radius
    }

    pub fn insert(&mut self, n: FreqVector, value: Complex64) -> Result<()> {
        Error::check_dim(self.dim, n.dim())?;
        if n.max_abs() > self.box_radius {
            return Err(Error::Precondition(format!(
                "{n} lies outside the box of radius {}",
                self.box_radius
            )));
        }
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::param(format!("non-finite amplitude at {n}")));
        }
        self.set(n, value);
        Ok(())
    }

    /// Insert without validation; crate-internal producers guarantee the box.
    pub(crate) fn set(&mut self, n: FreqVector, value: Complex64) {
        if value == Complex64::new(0.0, 0.0) {
            self.values.remove(&n);
        } else {
            self.values.insert(n, value);
        }
    }

    pub(crate) fn add_at(&mut self, n: FreqVector, value: Complex64) {
        let cur = self.get(&n);
        self.set(n, cur + value);
    }

    pub fn get(&self, n: &FreqVector) -> Complex64 {
        self.values.get(n).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FreqVector, &Complex64)> {
        self.values.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &FreqVector> {
        self.values.keys()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same values in a larger (or smaller) box.
    pub fn with_box_radius(&self, box_radius: i64) -> Result<Self> {
        let mut f = SpectralField::new(self.dim, box_radius)?;
        for (n, v) in self.iter() {
            f.insert(*n, *v)?;
        }
        Ok(f)
    }

    /// Restriction to the box of radius `box_radius` (Galerkin projection).
    pub fn restrict_to_box(&self, box_radius: i64) -> Result<Self> {
        let mut f = SpectralField::new(self.dim, box_radius)?;
        for (n, v) in self.iter().filter(|(n, _)| n.max_abs() <= box_radius) {
            f.set(*n, *v);
        }
        Ok(f)
    }

    pub fn map(&self, mut g: impl FnMut(&FreqVector, Complex64) -> Complex64) -> Self {
        let mut f = SpectralField {
            dim: self.dim,
            box_radius: self.box_radius,
            values: BTreeMap::new(),
        };
        for (n, v) in self.iter() {
            f.set(*n, g(n, *v));
        }
        f
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|_, v| v.conj())
    }

    /// `n -> f(-n)`.
    pub fn reflect(&self) -> Self {
        let mut f = SpectralField {
            dim: self.dim,
            box_radius: self.box_radius,
            values: BTreeMap::new(),
        };
        for (n, v) in self.iter() {
            f.set(-*n, *v);
        }
        f
    }

    /// Pointwise sum; the result lives in the larger of the two boxes.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim, other.dim)?;
        let mut f = self.clone();
        f.box_radius = self.box_radius.max(other.box_radius);
        for (n, v) in other.iter() {
            f.add_at(*n, *v);
        }
        Ok(f)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest pointwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max))
    }
}

/// `||f||_{l^p_s} = (sum_n <n>^{ps} |f(n)|^p)^{1/p}`, or `sup_n <n>^s |f(n)|`
/// for `p = inf`.
pub fn weighted_norm(f: &SpectralField, p: f64, s: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::param(format!("norm exponent p = {p} is below 1")));
    }
    if !s.is_finite() {
        return Err(Error::param(format!("weight exponent s = {s} is not finite")));
    }
    Ok(weighted_norm_unchecked(f.iter().map(|(n, v)| (n, v.norm())), p, s))
}

/// Shared kernel: `items` yields `(n, |f(n)|)`.
pub(crate) fn weighted_norm_unchecked<'a>(
    items: impl Iterator<Item = (&'a FreqVector, f64)>,
    p: f64,
    s: f64,
) -> f64 {
    if p.is_infinite() {
        items
            .map(|(n, a)| bracket_pow(n, s) * a)
            .fold(0.0, f64::max)
    } else {
        let sum: f64 = items
            .map(|(n, a)| bracket_pow(n, p * s) * a.powf(p))
            .sum();
        sum.powf(1.0 / p)
    }
}

/// `<n>^e`.
#[inline]
pub fn bracket_pow(n: &FreqVector, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        (n.bracket2() as f64).powf(0.5 * e)
    }
}

fn check_dyadic(shell: i64) -> Result<()> {
    if shell >= 1 && (shell as u64).is_power_of_two() {
        Ok(())
    } else {
        Err(Error::param(format!("{shell} is not a dyadic integer")))
    }
}

/// The dyadic `N` with `N <= <n> < 2N`.
pub fn dyadic_shell_of(n: &FreqVector) -> i64 {
    let b2 = n.bracket2();
    let mut shell = 1i64;
    while 4 * shell * shell <= b2 {
        shell *= 2;
    }
    shell
}

/// True iff `shell <= <n> < 2 shell`, evaluated exactly.
#[inline]
pub fn in_dyadic_shell(n: &FreqVector, shell: i64) -> bool {
    let b2 = n.bracket2();
    shell * shell <= b2 && b2 < 4 * shell * shell
}

/// `P_N f = 1_{N <= <n> < 2N} f`.
pub fn dyadic_project(f: &SpectralField, shell: i64) -> Result<SpectralField> {
    check_dyadic(shell)?;
    let mut out = SpectralField::new(f.dim(), f.box_radius())?;
    for (n, v) in f.iter().filter(|(n, _)| in_dyadic_shell(n, shell)) {
        out.set(*n, *v);
    }
    Ok(out)
}
