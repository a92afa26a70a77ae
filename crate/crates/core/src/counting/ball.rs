//! Lattice points in Euclidean balls, and on quadrics or hyperplanes inside them.

use crate::error::{Error, Result};
use crate::lattice::{FreqVector, COORD_BOUND, MAX_DIM};

/// `floor(R^2)`: a lattice offset `v` lies in the closed ball iff `|v|^2 <= floor(R^2)`.
pub(crate) fn radius2_floor(radius: f64) -> i64 {
    (radius * radius).floor() as i64
}

fn check_ball(center: &FreqVector, radius: f64) -> Result<i64> {
    if !radius.is_finite() {
        return Err(Error::Query(format!("ball radius {radius} does not bound the enumeration")));
    }
    if radius < 0.0 {
        return Err(Error::param(format!("negative ball radius {radius}")));
    }
    let reach = center.max_abs() as f64 + radius.ceil();
    if reach > COORD_BOUND as f64 {
        return Err(Error::Overflow(format!(
            "ball of radius {radius} around {center} leaves the coordinate range"
        )));
    }
    Ok(radius2_floor(radius))
}

/// Lattice points `n` with `|n - center| <= radius`, in lexicographic order.
pub fn enumerate_ball(d: usize, center: &FreqVector, radius: f64) -> Result<BallIter> {
    Error::check_dim(d, center.dim())?;
    let r2 = check_ball(center, radius)?;
    Ok(BallIter::new(*center, r2))
}

/// Odometer over the offsets of a ball, one coordinate per level.
#[derive(Clone, Debug)]
pub struct BallIter {
    center: FreqVector,
    r2: i64,
    cur: [i64; MAX_DIM],
    hi: [i64; MAX_DIM],
    // used[i] = sum of squares of cur[..i]
    used: [i64; MAX_DIM + 1],
    done: bool,
}

impl BallIter {
    pub(crate) fn new(center: FreqVector, r2: i64) -> Self {
        let mut it = BallIter {
            center,
            r2,
            cur: [0; MAX_DIM],
            hi: [0; MAX_DIM],
            used: [0; MAX_DIM + 1],
            done: r2 < 0,
        };
        if !it.done {
            it.reset_from(0);
        }
        it
    }

    fn reset_from(&mut self, level: usize) {
        for i in level..self.center.dim() {
            let h = (self.r2 - self.used[i]).isqrt();
            self.hi[i] = h;
            self.cur[i] = -h;
            self.used[i + 1] = self.used[i] + h * h;
        }
    }

    fn point(&self) -> FreqVector {
        let d = self.center.dim();
        let mut c = [0i64; MAX_DIM];
        for (i, slot) in c.iter_mut().enumerate().take(d) {
            *slot = self.center.coord(i) + self.cur[i];
        }
        FreqVector::from_slice_unchecked(&c[..d])
    }

    fn advance(&mut self) {
        let mut level = self.center.dim();
        while level > 0 {
            let i = level - 1;
            if self.cur[i] < self.hi[i] {
                self.cur[i] += 1;
                self.used[i + 1] = self.used[i] + self.cur[i] * self.cur[i];
                self.reset_from(i + 1);
                return;
            }
            level -= 1;
        }
        self.done = true;
    }
}

impl Iterator for BallIter {
    type Item = FreqVector;

    fn next(&mut self) -> Option<FreqVector> {
        if self.done {
            return None;
        }
        let p = self.point();
        self.advance();
        Some(p)
    }
}

/// First `len` coordinates of `v`.
fn prefix(v: &FreqVector, len: usize) -> FreqVector {
    FreqVector::from_slice_unchecked(&v.coords()[..len])
}

/// Visits every `x` in the ball `|x - center|^2 <= r2` with
/// `sum_i w_i (scale * x_i - shift_i)^2 = rho`. Requires `d >= 2`.
///
/// The first `d - 1` coordinates are enumerated over the projected ball and
/// the last one is solved for exactly.
pub(crate) fn for_each_on_quadric(
    center: &FreqVector,
    r2: i64,
    scale: i64,
    shift: &FreqVector,
    weights: &[i64],
    rho: i64,
    mut visit: impl FnMut(FreqVector),
) {
    let d = center.dim();
    debug_assert!(d >= 2 && scale > 0 && weights.len() == d);
    if rho < 0 || r2 < 0 {
        return;
    }
    let last = d - 1;
    for head in BallIter::new(prefix(center, last), r2) {
        let mut partial = 0i64;
        let mut off2 = 0i64;
        for i in 0..last {
            let t = scale * head.coord(i) - shift.coord(i);
            partial += weights[i] * t * t;
            let o = head.coord(i) - center.coord(i);
            off2 += o * o;
        }
        let rest = rho - partial;
        if rest < 0 || rest % weights[last] != 0 {
            continue;
        }
        let sq = rest / weights[last];
        let t = sq.isqrt();
        if t * t != sq {
            continue;
        }
        let roots: &[i64] = if t == 0 { &[0] } else { &[-t, t] };
        for &r in roots {
            let num = shift.coord(last) + r;
            if num % scale != 0 {
                continue;
            }
            let x = num / scale;
            let o = x - center.coord(last);
            if off2 + o * o <= r2 {
                let mut full = [0i64; MAX_DIM];
                full[..last].copy_from_slice(head.coords());
                full[last] = x;
                visit(FreqVector::from_slice_unchecked(&full[..d]));
            }
        }
    }
}

/// Visits every `x` in the ball `|x - center|^2 <= r2` with `normal . x = level`.
/// `normal` must be nonzero. Requires `d >= 2`.
pub(crate) fn for_each_on_hyperplane(
    center: &FreqVector,
    r2: i64,
    normal: &FreqVector,
    level: i64,
    mut visit: impl FnMut(FreqVector),
) {
    let d = center.dim();
    debug_assert!(d >= 2 && !normal.is_zero());
    if r2 < 0 {
        return;
    }
    // Solve for the coordinate with the largest coefficient.
    let pivot = (0..d).max_by_key(|&i| (normal.coord(i).abs(), usize::MAX - i)).unwrap();
    let others: Vec<usize> = (0..d).filter(|&i| i != pivot).collect();
    let reduced: Vec<i64> = others.iter().map(|&i| center.coord(i)).collect();
    let m = normal.coord(pivot);
    for free in BallIter::new(FreqVector::from_slice_unchecked(&reduced), r2) {
        let mut acc = level;
        let mut off2 = 0i64;
        for (j, &i) in others.iter().enumerate() {
            acc -= normal.coord(i) * free.coord(j);
            let o = free.coord(j) - center.coord(i);
            off2 += o * o;
        }
        if acc % m != 0 {
            continue;
        }
        let x = acc / m;
        let o = x - center.coord(pivot);
        if off2 + o * o > r2 {
            continue;
        }
        let mut full = [0i64; MAX_DIM];
        full[pivot] = x;
        for (j, &i) in others.iter().enumerate() {
            full[i] = free.coord(j);
        }
        visit(FreqVector::from_slice_unchecked(&full[..d]));
    }
}

pub(crate) fn ball_r2(center: &FreqVector, radius: f64) -> Result<i64> {
    check_ball(center, radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::box_points;
    use std::collections::BTreeSet;

    fn v(c: &[i64]) -> FreqVector {
        FreqVector::new(c).unwrap()
    }

    #[test]
    fn ball_examples() {
        assert_eq!(enumerate_ball(2, &v(&[0, 0]), 1.0).unwrap().count(), 5);
        let pts: Vec<_> = enumerate_ball(1, &v(&[7]), 0.5).unwrap().collect();
        assert_eq!(pts, vec![v(&[7])]);
        assert_eq!(enumerate_ball(2, &v(&[0, 0]), 2.5).unwrap().count(), 21);
    }

    #[test]
    fn ball_matches_box_filter() {
        for d in 1..=3 {
            for &r in &[0.0, 1.0, 1.5, 2.9, 3.0, 4.2] {
                let c = FreqVector::from_slice_unchecked(&[3, -1, 2][..d]);
                let fast: Vec<_> = enumerate_ball(d, &c, r).unwrap().collect();
                let slow: Vec<_> = box_points(d, 5)
                    .map(|o| c + o)
                    .filter(|p| ((*p - c).norm2() as f64) <= r * r)
                    .collect();
                assert_eq!(fast, slow, "d={d} r={r}");
            }
        }
    }

    #[test]
    fn ball_errors() {
        assert!(matches!(
            enumerate_ball(1, &v(&[0]), f64::INFINITY),
            Err(Error::Query(_))
        ));
        assert!(matches!(
            enumerate_ball(1, &v(&[COORD_BOUND]), 2.0),
            Err(Error::Overflow(_))
        ));
        assert!(enumerate_ball(2, &v(&[0]), 2.0).is_err());
    }

    #[test]
    fn quadric_matches_filter() {
        let c = v(&[1, -2, 0]);
        let shift = v(&[1, 0, -1]);
        let w = [1, 3, 1];
        for rho in 0..60 {
            let mut fast = BTreeSet::new();
            for_each_on_quadric(&c, 16, 2, &shift, &w, rho, |p| {
                assert!(fast.insert(p));
            });
            let slow: BTreeSet<_> = BallIter::new(c, 16)
                .filter(|p| {
                    (0..3)
                        .map(|i| {
                            let t = 2 * p.coord(i) - shift.coord(i);
                            w[i] * t * t
                        })
                        .sum::<i64>()
                        == rho
                })
                .collect();
            assert_eq!(fast, slow, "rho={rho}");
        }
    }

    #[test]
    fn hyperplane_matches_filter() {
        let c = v(&[0, 1, -1]);
        for normal in [v(&[1, 0, 0]), v(&[2, -3, 1]), v(&[0, 0, -4])] {
            for level in -12..12 {
                let mut fast = BTreeSet::new();
                for_each_on_hyperplane(&c, 10, &normal, level, |p| {
                    assert!(fast.insert(p));
                });
                let slow: BTreeSet<_> = BallIter::new(c, 10).filter(|p| p.dot(&normal) == level).collect();
                assert_eq!(fast, slow);
            }
        }
    }
}
