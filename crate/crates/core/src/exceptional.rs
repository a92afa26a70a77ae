//! Rank extraction `n_[m]` and the exceptional-set classifier.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lattice::{order_cmp, FreqTuple, FreqVector, MAX_ARITY, MAX_DEGREE, MAX_DIM};

/// Which part of the exceptional set a tuple falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExceptionalClass {
    NotInA,
    /// `n_[1] = n_[2]`
    InA1,
    /// `n_[2] = n_[3]`
    InA2,
    /// `n_[3] = n_[4]` and `<n_[2]> <= <n_[3]>^{3/2}` (only for `k = 2, d = 2`)
    InA3,
    /// Cubic case: `n_2 = n_1` or `n_2 = n_3`.
    InACubic,
}

impl ExceptionalClass {
    pub fn in_a(self) -> bool {
        self != ExceptionalClass::NotInA
    }
}

/// Which definition of the exceptional set applies for a given `(d, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExceptionalRegime {
    /// `d >= 2 + 2/k`: the set is empty.
    Empty,
    /// `k = 1`, `d in {2, 3}`.
    Cubic,
    /// `k >= 2`, `d in {1, 2}`; `with_a3` only for `(k, d) = (2, 2)`.
    Ranked { with_a3: bool },
}

impl ExceptionalRegime {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::param(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(Error::param(format!("degree k={k} outside 1..={MAX_DEGREE}")));
        }
        if (d, k) == (1, 1) {
            return Err(Error::UnsupportedCase(
                "the exceptional set is undefined for (d, k) = (1, 1)".into(),
            ));
        }
        // d >= 2 + 2/k  <=>  d k >= 2k + 2
        Ok(if d * k >= 2 * k + 2 {
            ExceptionalRegime::Empty
        } else if k == 1 {
            ExceptionalRegime::Cubic
        } else {
            ExceptionalRegime::Ranked {
                with_a3: k == 2 && d == 2,
            }
        })
    }

    /// Classifies a tuple of length `2k+1`. The caller guarantees the arity.
    pub fn classify(self, entries: &[FreqVector]) -> ExceptionalClass {
        match self {
            ExceptionalRegime::Empty => ExceptionalClass::NotInA,
            ExceptionalRegime::Cubic => {
                if entries[1] == entries[0] || entries[1] == entries[2] {
                    ExceptionalClass::InACubic
                } else {
                    ExceptionalClass::NotInA
                }
            }
            ExceptionalRegime::Ranked { with_a3 } => {
                let mut idx = [0usize; MAX_ARITY];
                let perm = rank_into(entries, &mut idx);
                classify_ranked(entries, perm, with_a3)
            }
        }
    }
}

/// Sorts slot indices so that `entries[perm[0]] >= entries[perm[1]] >= ...`
/// in the classifier order; identical vectors keep ascending slot order.
fn rank_into<'a>(entries: &[FreqVector], idx: &'a mut [usize; MAX_ARITY]) -> &'a [usize] {
    let len = entries.len();
    for (i, slot) in idx.iter_mut().enumerate().take(len) {
        *slot = i;
    }
    let perm = &mut idx[..len];
    // Insertion sort: tuples are short and this runs in the innermost loops.
    for i in 1..len {
        let mut j = i;
        while j > 0 && ranks_before(entries, perm[j], perm[j - 1]) {
            perm.swap(j, j - 1);
            j -= 1;
        }
    }
    perm
}

#[inline]
fn ranks_before(entries: &[FreqVector], a: usize, b: usize) -> bool {
    match order_cmp(&entries[a], &entries[b]) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a < b,
    }
}

fn classify_ranked(entries: &[FreqVector], perm: &[usize], with_a3: bool) -> ExceptionalClass {
    let ranked = |m: usize| &entries[perm[m - 1]];
    if ranked(1) == ranked(2) {
        return ExceptionalClass::InA1;
    }
    if ranked(2) == ranked(3) {
        return ExceptionalClass::InA2;
    }
    if with_a3 && ranked(3) == ranked(4) {
        // <a> <= <b>^{3/2}  <=>  (1 + |a|^2)^2 <= (1 + |b|^2)^3
        let a = ranked(2).bracket2() as i128;
        let b = ranked(3).bracket2() as i128;
        if a * a <= b * b * b {
            return ExceptionalClass::InA3;
        }
    }
    ExceptionalClass::NotInA
}

/// Rank permutation plus classification of one tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile {
    /// `permutation[m - 1]` is the 0-based slot holding `n_[m]`.
    pub permutation: Vec<usize>,
    pub class: ExceptionalClass,
}

impl RankProfile {
    /// `n_[m]` for 1-based `m`.
    pub fn ranked<'a>(&self, t: &'a FreqTuple, m: usize) -> &'a FreqVector {
        &t.entries()[self.permutation[m - 1]]
    }
}

pub fn rank_and_classify(t: &FreqTuple, d: usize, k: usize) -> Result<RankProfile> {
    let regime = ExceptionalRegime::new(d, k)?;
    if t.len() != 2 * k + 1 {
        return Err(Error::Arity(format!(
            "tuple has {} entries, expected 2k+1 = {}",
            t.len(),
            2 * k + 1
        )));
    }
    Error::check_dim(d, t.dim())?;
    let mut idx = [0usize; MAX_ARITY];
    let permutation = rank_into(t.entries(), &mut idx).to_vec();
    Ok(RankProfile {
        permutation,
        class: regime.classify(t.entries()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tup(rows: &[&[i64]]) -> FreqTuple {
        FreqTuple::new(rows.iter().map(|r| FreqVector::new(r).unwrap()).collect()).unwrap()
    }

    #[test]
    fn cubic_fixture() {
        let t = tup(&[&[3, 0], &[3, 0], &[5, 5]]);
        assert_eq!(rank_and_classify(&t, 2, 1).unwrap().class, ExceptionalClass::InACubic);
        let t = tup(&[&[3, 0], &[1, 0], &[5, 5]]);
        assert_eq!(rank_and_classify(&t, 2, 1).unwrap().class, ExceptionalClass::NotInA);
    }

    #[test]
    fn empty_regime() {
        let t = tup(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(rank_and_classify(&t, 3, 2).unwrap().class, ExceptionalClass::NotInA);
        assert_eq!(ExceptionalRegime::new(4, 1).unwrap(), ExceptionalRegime::Empty);
        assert_eq!(ExceptionalRegime::new(3, 1).unwrap(), ExceptionalRegime::Cubic);
    }

    #[test]
    fn a3_fixture() {
        // n_[3] = n_[4] = (2,0), (1 + 9)^2 = 100 <= (1 + 4)^3 = 125
        let t = tup(&[&[2, 0], &[4, 0], &[1, 0], &[3, 0], &[2, 0]]);
        let p = rank_and_classify(&t, 2, 2).unwrap();
        assert_eq!(p.class, ExceptionalClass::InA3);
        assert_eq!(p.permutation, vec![1, 3, 0, 4, 2]);
        // same multiset in d = 1 with k = 2: no A3 there
        let t = tup(&[&[2], &[4], &[1], &[3], &[2]]);
        assert_eq!(rank_and_classify(&t, 1, 2).unwrap().class, ExceptionalClass::NotInA);
    }

    #[test]
    fn a3_bracket_threshold() {
        // n_[2] = (5,0): (1+25)^2 = 676 > 125, so not in A3
        let t = tup(&[&[6, 0], &[5, 0], &[2, 0], &[2, 0], &[0, 0]]);
        assert_eq!(rank_and_classify(&t, 2, 2).unwrap().class, ExceptionalClass::NotInA);
    }

    #[test]
    fn a1_a2_precedence() {
        let t = tup(&[&[1], &[3], &[3], &[3], &[0]]);
        assert_eq!(rank_and_classify(&t, 1, 2).unwrap().class, ExceptionalClass::InA1);
        let t = tup(&[&[4], &[3], &[3], &[1], &[0]]);
        assert_eq!(rank_and_classify(&t, 1, 2).unwrap().class, ExceptionalClass::InA2);
        // -3 and 3 have equal norm but are distinct
        let t = tup(&[&[4], &[3], &[-3], &[1], &[0]]);
        assert_eq!(rank_and_classify(&t, 1, 2).unwrap().class, ExceptionalClass::NotInA);
    }

    #[test]
    fn errors() {
        let t = tup(&[&[1], &[2], &[3]]);
        assert!(matches!(rank_and_classify(&t, 1, 1), Err(Error::UnsupportedCase(_))));
        assert!(matches!(rank_and_classify(&t, 1, 2), Err(Error::Arity(_))));
    }
}
