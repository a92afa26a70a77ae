use std::collections::HashMap;
use std::ops::Range;

use num_complex::Complex64;

use crate::field::SpectralField;
use crate::lattice::{slot_sign, FreqVector};

/// Partial tuples over a contiguous range of slots, keyed by their signed
/// vector sum `v = sum_l s_l n_l` and signed quadratic sum
/// `q = sum_l s_l |n_l|^2`, where `s_l = (-1)^l` for the 0-based slot `l`.
///
/// Joining a left and a right table on `v_L + v_R = n` enumerates exactly the
/// tuples with signed sum `n`, and their resonance level is
/// `|n|^2 - q_L - q_R`.
#[derive(Clone, Debug)]
pub struct PairTable {
    slots: Range<usize>,
    multiplicity: u64,
    keys: Vec<(FreqVector, i64)>,
    amps: Vec<Complex64>,
    // `slots.len()` entries per item; empty when items were merged by key
    tuples: Vec<FreqVector>,
    by_vec: HashMap<FreqVector, Vec<u32>>,
}

impl PairTable {
    /// Enumerates the product of the supports of `fields[slots]`. With
    /// `keep_tuples == false` items sharing a key are merged into one.
    pub fn build(fields: &[SpectralField], slots: Range<usize>, keep_tuples: bool) -> Self {
        let supports: Vec<Vec<(FreqVector, Complex64)>> = fields[slots.clone()]
            .iter()
            .map(|f| f.iter().map(|(n, v)| (*n, *v)).collect())
            .collect();
        let width = supports.len();
        let multiplicity = supports.iter().map(|s| s.len() as u64).product();
        let mut keys = Vec::new();
        let mut amps = Vec::new();
        let mut tuples = Vec::new();
        let mut merged: HashMap<(FreqVector, i64), usize> = HashMap::new();

        if multiplicity > 0 {
            let dim = supports[0][0].0.dim();
            let mut pos = vec![0usize; width];
            loop {
                let mut v = FreqVector::zero(dim);
                let mut q = 0i64;
                let mut amp = Complex64::new(1.0, 0.0);
                for (j, &p) in pos.iter().enumerate() {
                    let (n, a) = supports[j][p];
                    if slot_sign(slots.start + j) > 0 {
                        v = v + n;
                        q += n.norm2();
                    } else {
                        v = v - n;
                        q -= n.norm2();
                    }
                    amp *= a;
                }
                if keep_tuples {
                    keys.push((v, q));
                    amps.push(amp);
                    tuples.extend(pos.iter().enumerate().map(|(j, &p)| supports[j][p].0));
                } else {
                    match merged.get(&(v, q)) {
                        Some(&i) => amps[i] += amp,
                        None => {
                            merged.insert((v, q), keys.len());
                            keys.push((v, q));
                            amps.push(amp);
                        }
                    }
                }
                // odometer, last slot fastest
                let mut j = width;
                let exhausted = loop {
                    if j == 0 {
                        break true;
                    }
                    j -= 1;
                    pos[j] += 1;
                    if pos[j] < supports[j].len() {
                        break false;
                    }
                    pos[j] = 0;
                };
                if exhausted {
                    break;
                }
            }
        }

        let mut by_vec: HashMap<FreqVector, Vec<u32>> = HashMap::new();
        for (i, (v, _)) in keys.iter().enumerate() {
            by_vec.entry(*v).or_default().push(i as u32);
        }
        for list in by_vec.values_mut() {
            list.sort_by_key(|&i| (keys[i as usize].1, i));
        }
        PairTable {
            slots,
            multiplicity,
            keys,
            amps,
            tuples: if keep_tuples { tuples } else { Vec::new() },
            by_vec,
        }
    }

    pub fn slots(&self) -> Range<usize> {
        self.slots.clone()
    }

    /// Number of partial tuples enumerated: the product of the support sizes.
    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// Number of stored items (fewer than the multiplicity after merging).
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> (FreqVector, i64) {
        self.keys[i]
    }

    pub fn amp(&self, i: usize) -> Complex64 {
        self.amps[i]
    }

    /// The partial tuple of item `i`, if tuples were kept.
    pub fn tuple(&self, i: usize) -> Option<&[FreqVector]> {
        let w = self.slots.len();
        if self.tuples.is_empty() {
            None
        } else {
            Some(&self.tuples[i * w..(i + 1) * w])
        }
    }

    /// Distinct vector keys.
    pub fn vectors(&self) -> impl Iterator<Item = &FreqVector> {
        self.by_vec.keys()
    }

    /// Items with vector key `v`, ordered by quadratic key.
    pub fn with_vector(&self, v: &FreqVector) -> &[u32] {
        self.by_vec.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Items with key `(v, q)`.
    pub fn with_key(&self, v: &FreqVector, q: i64) -> &[u32] {
        let list = self.with_vector(v);
        let lo = list.partition_point(|&i| self.keys[i as usize].1 < q);
        let hi = list.partition_point(|&i| self.keys[i as usize].1 <= q);
        &list[lo..hi]
    }
}
