//! Constrained multilinear sums
//! `n -> sum_{n = n_1 - n_2 + ... + n_{2k+1}} 1_{constraint} prod_l w_l(n_l)`,
//! their decomposition by resonance level, weighted-norm estimate ratios,
//! dyadic block checks and extremizer search.

mod estimate;
mod extremizer;
mod pair_table;

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exceptional::ExceptionalRegime;
use crate::field::{bracket_pow, SpectralField};
use crate::lattice::{phi_unchecked, signed_sum, FreqVector, COORD_BOUND, MAX_ARITY, MAX_DEGREE};

pub use estimate::{
    counterexample_family, dyadic_block_check, dyadic_block_worst, epsilon_k, estimate_ratio, s_c, s_e,
    Counterexample, EstimateSpec, EstimateTag, ParamRegime,
};
pub use extremizer::{extremizer_search, ExtremizerResult};
pub use pair_table::PairTable;

/// Which tuples a sum keeps, relative to the exceptional set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Restriction {
    None,
    OnA,
    OnAc,
}

impl std::str::FromStr for Restriction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Restriction::None),
            "ona" | "a" => Ok(Restriction::OnA),
            "onac" | "ac" => Ok(Restriction::OnAc),
            other => Err(Error::param(format!("unknown restriction {other:?}"))),
        }
    }
}

/// Evaluation strategy; both give the same sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvalMode {
    /// Meet in the middle on `(vector sum, quadratic sum)` keys.
    PairTable,
    /// Every tuple of the product of supports, one at a time.
    Naive,
}

/// Degree `k` of a list of `2k + 1` fields, after checking shapes.
pub(crate) fn check_fields(fields: &[SpectralField]) -> Result<(usize, usize)> {
    let len = fields.len();
    if len < 3 || len.is_multiple_of(2) {
        return Err(Error::Arity(format!("need an odd number >= 3 of fields, got {len}")));
    }
    let k = (len - 1) / 2;
    if k > MAX_DEGREE {
        return Err(Error::Arity(format!("degree {k} exceeds {MAX_DEGREE}")));
    }
    let d = fields[0].dim();
    for f in fields {
        Error::check_dim(d, f.dim())?;
    }
    Ok((d, k))
}

fn output_box(fields: &[SpectralField]) -> Result<i64> {
    let r: i64 = fields.iter().map(|f| f.box_radius()).sum();
    if r > COORD_BOUND {
        return Err(Error::Overflow(format!("output box radius {r} exceeds the coordinate range")));
    }
    Ok(r)
}

#[derive(Clone, Copy)]
struct Filter {
    regime: ExceptionalRegime,
    want_a: bool,
}

fn filter_for(restriction: Restriction, d: usize, k: usize) -> Result<Option<Filter>> {
    Ok(match restriction {
        Restriction::None => None,
        Restriction::OnA | Restriction::OnAc => Some(Filter {
            regime: ExceptionalRegime::new(d, k)?,
            want_a: restriction == Restriction::OnA,
        }),
    })
}

/// Sorts by level and sums equal levels, keeping the accumulation order fixed.
fn merge_levels(mut items: Vec<(i64, Complex64)>) -> Vec<(i64, Complex64)> {
    items.sort_by_key(|e| e.0);
    let mut out: Vec<(i64, Complex64)> = Vec::new();
    for (mu, v) in items {
        match out.last_mut() {
            Some(last) if last.0 == mu => last.1 += v,
            _ => out.push((mu, v)),
        }
    }
    out
}

struct Join {
    left: PairTable,
    right: PairTable,
    arity: usize,
    filter: Option<Filter>,
}

impl Join {
    fn new(fields: &[SpectralField], k: usize, filter: Option<Filter>) -> Self {
        let keep = filter.is_some();
        Join {
            left: PairTable::build(fields, 0..k, keep),
            right: PairTable::build(fields, k..2 * k + 1, keep),
            arity: 2 * k + 1,
            filter,
        }
    }

    fn levels_at(&self, n: &FreqVector, mu: Option<i64>) -> Vec<(i64, Complex64)> {
        let n2 = n.norm2();
        let mut buf = [*n; MAX_ARITY];
        let mut out = Vec::new();
        for li in 0..self.left.len() {
            let (vl, ql) = self.left.key(li);
            let vr = *n - vl;
            let cands = match mu {
                Some(m) => self.right.with_key(&vr, n2 - ql - m),
                None => self.right.with_vector(&vr),
            };
            for &ri in cands {
                let ri = ri as usize;
                if let Some(f) = self.filter {
                    let lt = self.left.tuple(li).expect("tuples kept");
                    let rt = self.right.tuple(ri).expect("tuples kept");
                    buf[..lt.len()].copy_from_slice(lt);
                    buf[lt.len()..self.arity].copy_from_slice(rt);
                    if f.regime.classify(&buf[..self.arity]).in_a() != f.want_a {
                        continue;
                    }
                }
                let qr = self.right.key(ri).1;
                out.push((n2 - ql - qr, self.left.amp(li) * self.right.amp(ri)));
            }
        }
        merge_levels(out)
    }

    fn candidates(&self) -> Vec<FreqVector> {
        let rv: Vec<&FreqVector> = self.right.vectors().collect();
        let mut set = BTreeSet::new();
        for vl in self.left.vectors() {
            for vr in &rv {
                set.insert(*vl + **vr);
            }
        }
        set.into_iter().collect()
    }
}

/// All `(signed sum, level, product)` triples by brute force.
fn naive_levels(
    fields: &[SpectralField],
    filter: Option<Filter>,
    keep: impl Fn(&FreqVector, i64) -> bool,
) -> HashMap<FreqVector, Vec<(i64, Complex64)>> {
    let supports: Vec<Vec<(FreqVector, Complex64)>> = fields
        .iter()
        .map(|f| f.iter().map(|(n, v)| (*n, *v)).collect())
        .collect();
    let arity = fields.len();
    let mut acc: HashMap<FreqVector, Vec<(i64, Complex64)>> = HashMap::new();
    if supports.iter().any(|s| s.is_empty()) {
        return acc;
    }
    let mut pos = vec![0usize; arity];
    let mut tuple = vec![supports[0][0].0; arity];
    loop {
        let mut amp = Complex64::new(1.0, 0.0);
        for l in 0..arity {
            tuple[l] = supports[l][pos[l]].0;
            amp *= supports[l][pos[l]].1;
        }
        let n = signed_sum(&tuple);
        let mu = phi_unchecked(&n, &tuple);
        let admitted = filter.is_none_or(|f| f.regime.classify(&tuple).in_a() == f.want_a);
        if admitted && keep(&n, mu) {
            acc.entry(n).or_default().push((mu, amp));
        }
        let mut l = arity;
        let exhausted = loop {
            if l == 0 {
                break true;
            }
            l -= 1;
            pos[l] += 1;
            if pos[l] < supports[l].len() {
                break false;
            }
            pos[l] = 0;
        };
        if exhausted {
            break;
        }
    }
    acc
}

/// A sum resolved by output frequency and resonance level:
/// `rows[i] = (n, [(mu, sum over tuples with signed sum n and level mu)])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantLevels {
    dim: usize,
    box_radius: i64,
    rows: Vec<(FreqVector, Vec<(i64, Complex64)>)>,
}

impl ResonantLevels {
    pub fn rows(&self) -> &[(FreqVector, Vec<(i64, Complex64)>)] {
        &self.rows
    }

    pub fn at(&self, n: &FreqVector) -> &[(i64, Complex64)] {
        match self.rows.binary_search_by(|r| r.0.cmp(n)) {
            Ok(i) => &self.rows[i].1,
            Err(_) => &[],
        }
    }

    /// Every level that occurs, ascending.
    pub fn levels(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.rows.iter().flat_map(|r| r.1.iter().map(|e| e.0)).collect();
        set.into_iter().collect()
    }

    /// Sum over all levels.
    pub fn total(&self) -> SpectralField {
        let mut f = SpectralField::new(self.dim, self.box_radius).expect("validated box");
        for (n, lv) in &self.rows {
            let s: Complex64 = lv.iter().map(|e| e.1).sum();
            f.set(*n, s);
        }
        f
    }

    /// The slice at level `mu`.
    pub fn level(&self, mu: i64) -> SpectralField {
        let mut f = SpectralField::new(self.dim, self.box_radius).expect("validated box");
        for (n, lv) in &self.rows {
            if let Ok(i) = lv.binary_search_by_key(&mu, |e| e.0) {
                f.set(*n, lv[i].1);
            }
        }
        f
    }

    /// `||total||_{l^p_s}`.
    pub fn total_norm(&self, p: f64, s: f64) -> f64 {
        let items = self
            .rows
            .iter()
            .map(|(n, lv)| (n, lv.iter().map(|e| e.1).sum::<Complex64>().norm()));
        crate::field::weighted_norm_unchecked(items, p, s)
    }

    /// `sup_mu ||level(mu)||_{l^p_s}`, or the norm at one level when `mu` is given.
    pub fn sup_level_norm(&self, p: f64, s: f64, mu: Option<i64>) -> f64 {
        if p.is_infinite() {
            return self
                .rows
                .iter()
                .flat_map(|(n, lv)| {
                    let w = bracket_pow(n, s);
                    lv.iter()
                        .filter(move |e| mu.is_none_or(|m| m == e.0))
                        .map(move |e| w * e.1.norm())
                })
                .fold(0.0, f64::max);
        }
        let mut per_level: HashMap<i64, f64> = HashMap::new();
        for (n, lv) in &self.rows {
            let w = bracket_pow(n, p * s);
            for (m, v) in lv {
                if mu.is_none_or(|x| x == *m) {
                    *per_level.entry(*m).or_default() += w * v.norm().powf(p);
                }
            }
        }
        per_level.values().map(|x| x.powf(1.0 / p)).fold(0.0, f64::max)
    }
}

/// Resolves the restricted sum of `fields` by output frequency and level.
pub fn resonant_levels(
    fields: &[SpectralField],
    restriction: Restriction,
    mode: EvalMode,
) -> Result<ResonantLevels> {
    let (d, k) = check_fields(fields)?;
    let box_radius = output_box(fields)?;
    let filter = filter_for(restriction, d, k)?;
    let rows = match mode {
        EvalMode::PairTable => {
            let join = Join::new(fields, k, filter);
            join.candidates()
                .into_par_iter()
                .map(|n| {
                    let lv = join.levels_at(&n, None);
                    (n, lv)
                })
                .filter(|r| !r.1.is_empty())
                .collect()
        }
        EvalMode::Naive => {
            let acc = naive_levels(fields, filter, |_, _| true);
            let mut rows: Vec<_> = acc.into_iter().map(|(n, lv)| (n, merge_levels(lv))).collect();
            rows.sort_by_key(|a| a.0);
            rows
        }
    };
    Ok(ResonantLevels {
        dim: d,
        box_radius,
        rows,
    })
}

/// `n -> sum_{n = n_1 - n_2 + ... + n_{2k+1}} prod_l w_l(n_l)`, no conjugation.
pub fn signed_convolution(fields: &[SpectralField]) -> Result<SpectralField> {
    resonant_sum(fields, None, None, Restriction::None)
}

/// As [`signed_convolution`], keeping only tuples with `Phi = mu` (when
/// given) that satisfy `restriction`; restricted to `n_target` when given.
pub fn resonant_sum(
    fields: &[SpectralField],
    n_target: Option<&FreqVector>,
    mu: Option<i64>,
    restriction: Restriction,
) -> Result<SpectralField> {
    resonant_sum_with(fields, n_target, mu, restriction, EvalMode::PairTable)
}

pub fn resonant_sum_with(
    fields: &[SpectralField],
    n_target: Option<&FreqVector>,
    mu: Option<i64>,
    restriction: Restriction,
    mode: EvalMode,
) -> Result<SpectralField> {
    let (d, k) = check_fields(fields)?;
    let box_radius = output_box(fields)?;
    if let Some(n) = n_target {
        Error::check_dim(d, n.dim())?;
    }
    let filter = filter_for(restriction, d, k)?;
    let mut out = SpectralField::new(d, box_radius)?;
    let wanted = |n: &FreqVector, m: i64| n_target.is_none_or(|t| t == n) && mu.is_none_or(|x| x == m);
    match mode {
        EvalMode::PairTable => {
            let join = Join::new(fields, k, filter);
            let targets = match n_target {
                Some(n) if n.max_abs() <= box_radius => vec![*n],
                Some(_) => Vec::new(),
                None => join.candidates(),
            };
            let values: Vec<(FreqVector, Complex64)> = targets
                .into_par_iter()
                .map(|n| {
                    let s = join.levels_at(&n, mu).iter().map(|e| e.1).sum();
                    (n, s)
                })
                .collect();
            for (n, v) in values {
                out.set(n, v);
            }
        }
        EvalMode::Naive => {
            let acc = naive_levels(fields, filter, wanted);
            for (n, lv) in acc {
                out.set(n, lv.iter().map(|e| e.1).sum());
            }
        }
    }
    Ok(out)
}
