//! Galerkin-truncated interaction-picture flow
//! `d/dt w(n) = c lambda sum_{n = n_1 - n_2 + ... + n_{2k+1}} e^{it Phi} w(n_1) conj(w(n_2)) ... w(n_{2k+1})`
//! on the box `|n|_inf <= N_box`, with the exceptional-set splitting.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exceptional::ExceptionalRegime;
use crate::field::{weighted_norm, SpectralField};
use crate::lattice::{box_points, phi_unchecked, FreqVector, MAX_ARITY, MAX_DEGREE, MAX_DIM};

/// Which tuples drive the flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Splitting {
    Full,
    /// Tuples outside the exceptional set.
    PrincipalAc,
    /// Tuples inside the exceptional set.
    RemainderR,
}

impl std::str::FromStr for Splitting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Splitting::Full),
            "principalac" | "principal" => Ok(Splitting::PrincipalAc),
            "remainderr" | "remainder" => Ok(Splitting::RemainderR),
            other => Err(Error::param(format!("unknown splitting {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowParams {
    pub d: usize,
    pub k: usize,
    pub lambda: Complex64,
    pub box_radius: i64,
    /// Defaults to `-i`, which makes the Full flow mass-conserving for real `lambda`.
    pub c_const: Complex64,
    pub splitting: Splitting,
    /// Cap on `(2 N_box + 1)^{d(2k+1)}`, the tuple enumeration size.
    pub table_budget: u64,
    /// Cap on the number of time steps of one integration.
    pub max_steps: usize,
    /// Keep every `stride`-th step (the final state is always kept).
    pub stride: usize,
}

impl FlowParams {
    pub fn new(d: usize, k: usize, lambda: Complex64, box_radius: i64) -> Result<Self> {
        let p = FlowParams {
            d,
            k,
            lambda,
            box_radius,
            c_const: Complex64::new(0.0, -1.0),
            splitting: Splitting::Full,
            table_budget: 100_000_000,
            max_steps: 10_000_000,
            stride: 1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_splitting(mut self, splitting: Splitting) -> Result<Self> {
        self.splitting = splitting;
        self.validate()?;
        Ok(self)
    }

    pub fn with_box_radius(mut self, box_radius: i64) -> Result<Self> {
        self.box_radius = box_radius;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIM).contains(&self.d) || !(1..=MAX_DEGREE).contains(&self.k) {
            return Err(Error::param(format!("(d, k) = ({}, {}) out of range", self.d, self.k)));
        }
        if self.box_radius < 1 {
            return Err(Error::param(format!("N_box = {} must be at least 1", self.box_radius)));
        }
        if self.splitting != Splitting::Full && (self.d, self.k) == (1, 1) {
            return Err(Error::UnsupportedCase("only the Full splitting exists for (d, k) = (1, 1)".into()));
        }
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(self.lambda) || !finite(self.c_const) {
            return Err(Error::param("lambda and c must be finite"));
        }
        if self.stride == 0 {
            return Err(Error::param("snapshot stride must be positive"));
        }
        Ok(())
    }

    fn coefficient(&self) -> Complex64 {
        self.c_const * self.lambda
    }
}

/// Tuples sharing an output frequency, a resonance level and an
/// exceptional-set flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Group {
    pub mu: i64,
    pub in_a: bool,
    start: usize,
    len: usize,
}

impl Group {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Every tuple with entries and signed sum in the box, grouped per output
/// `n` by `(mu, flag)`. Tuples are stored as indices into `points`.
#[derive(Clone, Debug)]
pub struct InteractionTable {
    d: usize,
    k: usize,
    box_radius: i64,
    points: Vec<FreqVector>,
    group_start: Vec<usize>,
    groups: Vec<Group>,
    tuples: Vec<u32>,
}

impl InteractionTable {
    pub fn build(params: &FlowParams) -> Result<Self> {
        params.validate()?;
        let (d, k, b) = (params.d, params.k, params.box_radius);
        let side = (2 * b + 1) as u64;
        let arity = 2 * k + 1;
        let work = (side as f64).powi((d * arity) as i32);
        if work > params.table_budget as f64 {
            return Err(Error::Budget(format!(
                "(2N_box+1)^(d(2k+1)) = {work:.3e} exceeds the table budget {}",
                params.table_budget
            )));
        }
        let regime = ExceptionalRegime::new(d, k).ok();
        let points: Vec<FreqVector> = box_points(d, b).collect();
        let index = |v: &FreqVector| -> Option<u32> {
            let mut idx = 0u64;
            for i in 0..d {
                let c = v.coord(i);
                if c.abs() > b {
                    return None;
                }
                idx = idx * side + (c + b) as u64;
            }
            Some(idx as u32)
        };
        let npts = points.len();

        let per_n: Vec<(Vec<(i64, bool, usize)>, Vec<u32>)> = (0..npts)
            .into_par_iter()
            .map(|ni| {
                let n = points[ni];
                // (mu, flag, tuple) before grouping
                let mut found: Vec<(i64, bool, [u32; MAX_ARITY])> = Vec::new();
                let mut pos = vec![0usize; arity - 1];
                let mut entries = [n; MAX_ARITY];
                loop {
                    // last entry solves n = n_1 - n_2 + ... + n_{2k+1}
                    let mut partial = FreqVector::zero(d);
                    for (l, &p) in pos.iter().enumerate() {
                        entries[l] = points[p];
                        partial = if l % 2 == 0 { partial + points[p] } else { partial - points[p] };
                    }
                    let last = n - partial;
                    if let Some(li) = index(&last) {
                        entries[arity - 1] = last;
                        let mu = phi_unchecked(&n, &entries[..arity]);
                        let in_a = regime.is_some_and(|r| r.classify(&entries[..arity]).in_a());
                        let mut ids = [0u32; MAX_ARITY];
                        for (l, &p) in pos.iter().enumerate() {
                            ids[l] = p as u32;
                        }
                        ids[arity - 1] = li;
                        found.push((mu, in_a, ids));
                    }
                    let mut j = arity - 1;
                    let exhausted = loop {
                        if j == 0 {
                            break true;
                        }
                        j -= 1;
                        pos[j] += 1;
                        if pos[j] < npts {
                            break false;
                        }
                        pos[j] = 0;
                    };
                    if exhausted {
                        break;
                    }
                }
                found.sort_by_key(|e| (e.0, e.1));
                let mut groups: Vec<(i64, bool, usize)> = Vec::new();
                let mut flat = Vec::with_capacity(found.len() * arity);
                for (mu, in_a, ids) in &found {
                    match groups.last_mut() {
                        Some(g) if g.0 == *mu && g.1 == *in_a => g.2 += 1,
                        _ => groups.push((*mu, *in_a, 1)),
                    }
                    flat.extend_from_slice(&ids[..arity]);
                }
                (groups, flat)
            })
            .collect();

        let mut group_start = Vec::with_capacity(npts + 1);
        let mut groups = Vec::new();
        let mut tuples = Vec::new();
        for (gs, flat) in per_n {
            group_start.push(groups.len());
            let mut start = tuples.len() / arity;
            for (mu, in_a, len) in gs {
                groups.push(Group { mu, in_a, start, len });
                start += len;
            }
            tuples.extend(flat);
        }
        group_start.push(groups.len());
        Ok(InteractionTable {
            d,
            k,
            box_radius: b,
            points,
            group_start,
            groups,
            tuples,
        })
    }

    pub fn box_radius(&self) -> i64 {
        self.box_radius
    }

    pub fn points(&self) -> &[FreqVector] {
        &self.points
    }

    /// Groups of the output frequency with dense index `i`.
    pub fn groups_at(&self, i: usize) -> &[Group] {
        &self.groups[self.group_start[i]..self.group_start[i + 1]]
    }

    /// Tuple `j` of a group, as points.
    pub fn group_tuples<'a>(&'a self, g: &Group) -> impl Iterator<Item = Vec<FreqVector>> + 'a {
        let arity = 2 * self.k + 1;
        (g.start..g.start + g.len).map(move |t| {
            self.tuples[t * arity..(t + 1) * arity]
                .iter()
                .map(|&p| self.points[p as usize])
                .collect()
        })
    }

    /// Total number of stored tuples.
    pub fn multiplicity(&self) -> usize {
        self.tuples.len() / (2 * self.k + 1)
    }

    fn index_of(&self, n: &FreqVector) -> Option<usize> {
        let side = 2 * self.box_radius + 1;
        let mut idx = 0i64;
        for i in 0..self.d {
            let c = n.coord(i);
            if c.abs() > self.box_radius {
                return None;
            }
            idx = idx * side + c + self.box_radius;
        }
        Some(idx as usize)
    }

    /// Dense state vector of `omega`; fails if the support leaves the box.
    pub fn to_dense(&self, omega: &SpectralField) -> Result<Vec<Complex64>> {
        Error::check_dim(self.d, omega.dim())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.points.len()];
        for (n, v) in omega.iter() {
            let i = self.index_of(n).ok_or_else(|| {
                Error::Precondition(format!("{n} lies outside the Galerkin box of radius {}", self.box_radius))
            })?;
            out[i] = *v;
        }
        Ok(out)
    }

    pub fn from_dense(&self, state: &[Complex64]) -> SpectralField {
        let mut f = SpectralField::new(self.d, self.box_radius).expect("validated box");
        for (p, v) in self.points.iter().zip(state) {
            f.set(*p, *v);
        }
        f
    }

    /// Right-hand side on a dense state.
    pub fn rhs_dense(&self, state: &[Complex64], t: f64, coeff: Complex64, splitting: Splitting) -> Vec<Complex64> {
        let arity = 2 * self.k + 1;
        let conj: Vec<Complex64> = state.iter().map(|z| z.conj()).collect();
        (0..self.points.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for g in self.groups_at(i) {
                    let keep = match splitting {
                        Splitting::Full => true,
                        Splitting::PrincipalAc => !g.in_a,
                        Splitting::RemainderR => g.in_a,
                    };
                    if !keep {
                        continue;
                    }
                    let mut inner = Complex64::new(0.0, 0.0);
                    for tup in self.tuples[g.start * arity..(g.start + g.len) * arity].chunks_exact(arity) {
                        let mut prod = state[tup[0] as usize];
                        for (l, &p) in tup.iter().enumerate().skip(1) {
                            prod *= if l % 2 == 0 { state[p as usize] } else { conj[p as usize] };
                        }
                        inner += prod;
                    }
                    acc += Complex64::from_polar(1.0, t * g.mu as f64) * inner;
                }
                coeff * acc
            })
            .collect()
    }
}

/// A table bound to its parameters.
#[derive(Clone, Debug)]
pub struct Flow {
    params: FlowParams,
    table: InteractionTable,
}

fn axpy(y: &[Complex64], h: f64, k: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

impl Flow {
    pub fn new(params: FlowParams) -> Result<Self> {
        let table = InteractionTable::build(&params)?;
        Ok(Flow { params, table })
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    pub fn table(&self) -> &InteractionTable {
        &self.table
    }

    pub fn rhs(&self, omega: &SpectralField, t: f64) -> Result<SpectralField> {
        let state = self.table.to_dense(omega)?;
        let out = self
            .table
            .rhs_dense(&state, t, self.params.coefficient(), self.params.splitting);
        Ok(self.table.from_dense(&out))
    }

    fn f(&self, y: &[Complex64], t: f64) -> Vec<Complex64> {
        self.table.rhs_dense(y, t, self.params.coefficient(), self.params.splitting)
    }

    fn rk4_step(&self, y: &[Complex64], t: f64, h: f64) -> Vec<Complex64> {
        let k1 = self.f(y, t);
        let k2 = self.f(&axpy(y, h / 2.0, &k1), t + h / 2.0);
        let k3 = self.f(&axpy(y, h / 2.0, &k2), t + h / 2.0);
        let k4 = self.f(&axpy(y, h, &k3), t + h);
        y.iter()
            .enumerate()
            .map(|(i, v)| v + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
            .collect()
    }

    /// Integrates `[t0, t1]` with `ceil((t1 - t0)/dt)` equal steps, calling
    /// `snap(step, t, state)` after each step. `step_offset` numbers steps globally.
    fn integrate(
        &self,
        y: &mut Vec<Complex64>,
        t0: f64,
        t1: f64,
        dt: f64,
        step_offset: usize,
        mut snap: impl FnMut(usize, f64, &[Complex64]),
    ) -> Result<usize> {
        let span = t1 - t0;
        let raw = span / dt;
        let steps = if (raw - raw.round()).abs() < 1e-9 * raw.max(1.0) {
            raw.round()
        } else {
            raw.ceil()
        };
        if steps > self.params.max_steps as f64 {
            return Err(Error::Budget(format!(
                "{steps} steps exceed the step budget {}",
                self.params.max_steps
            )));
        }
        let steps = steps as usize;
        if steps == 0 {
            return Ok(0);
        }
        let h = span / steps as f64;
        for j in 0..steps {
            let t = t0 + j as f64 * h;
            let next = self.rk4_step(y, t, h);
            if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Divergence {
                    step: step_offset + j + 1,
                });
            }
            *y = next;
            let t_next = if j + 1 == steps { t1 } else { t0 + (j + 1) as f64 * h };
            snap(step_offset + j + 1, t_next, y);
        }
        Ok(steps)
    }

    /// Classical RK4 with `ceil(T/dt)` equal steps; snapshots at `t = 0`,
    /// every `stride` steps, and at `T`.
    pub fn evolve(&self, omega0: &SpectralField, t_end: f64, dt: f64) -> Result<Vec<(f64, SpectralField)>> {
        check_times(t_end, dt)?;
        let mut y = self.table.to_dense(omega0)?;
        let mut traj = vec![(0.0, self.table.from_dense(&y))];
        let stride = self.params.stride;
        let mut last_step = 0;
        let steps = self.integrate(&mut y, 0.0, t_end, dt, 0, |step, t, state| {
            if step % stride == 0 {
                traj.push((t, self.table.from_dense(state)));
                last_step = step;
            }
        })?;
        if steps > 0 && last_step != steps {
            traj.push((t_end, self.table.from_dense(&y)));
        }
        Ok(traj)
    }

    /// States at each of the increasing `times` (starting from `t = 0`),
    /// integrating every segment with steps of size at most `dt`.
    pub fn evolve_to_times(&self, omega0: &SpectralField, times: &[f64], dt: f64) -> Result<Vec<(f64, SpectralField)>> {
        let mut y = self.table.to_dense(omega0)?;
        let mut out = Vec::with_capacity(times.len());
        let mut t = 0.0;
        let mut offset = 0;
        for &target in times {
            if !(target >= t && target.is_finite()) {
                return Err(Error::param(format!("report times must be finite and nondecreasing, got {target}")));
            }
            check_times(target - t, dt)?;
            offset += self.integrate(&mut y, t, target, dt, offset, |_, _, _| {})?;
            t = target;
            out.push((t, self.table.from_dense(&y)));
        }
        Ok(out)
    }
}

fn check_times(t_end: f64, dt: f64) -> Result<()> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::param(format!("T = {t_end} must be finite and nonnegative")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param(format!("dt = {dt} must be positive")));
    }
    Ok(())
}

pub fn build_interaction_table(params: &FlowParams) -> Result<InteractionTable> {
    InteractionTable::build(params)
}

/// One-shot right-hand side (builds the table).
pub fn rhs(omega: &SpectralField, t: f64, params: &FlowParams) -> Result<SpectralField> {
    Flow::new(params.clone())?.rhs(omega, t)
}

/// One-shot integration (builds the table).
pub fn evolve(omega0: &SpectralField, t_end: f64, dt: f64, params: &FlowParams) -> Result<Vec<(f64, SpectralField)>> {
    Flow::new(params.clone())?.evolve(omega0, t_end, dt)
}

/// `(sum |w(n)|^2, ||w||_{l^2_s})`.
pub fn observables(omega: &SpectralField, s: f64) -> Result<(f64, f64)> {
    let mass = omega.iter().map(|(_, v)| v.norm_sqr()).sum();
    Ok((mass, weighted_norm(omega, 2.0, s)?))
}

/// `w(n) -> e^{iT|n|^2} conj(w(n))`: in these variables, the time reversal of
/// the flow over `[0, T]` (for `c` imaginary and `lambda` real).
pub fn time_reversal_map(omega: &SpectralField, t: f64) -> SpectralField {
    omega.map(|n, v| Complex64::from_polar(1.0, t * n.norm2() as f64) * v.conj())
}

/// One run of a resolution study.
#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessRow {
    pub dt: f64,
    pub box_radius: i64,
    /// `sup_t ||w_run(t) - w_ref(t)||_{l^2_s}` over the report times.
    pub distance: f64,
    pub final_sobolev: f64,
}

/// Evolves `omega0` for every `(dt, N_box)` pair and compares each run with
/// the finest one (smallest `dt`, largest box) at `report_points` equally
/// spaced times in `(0, T]`.
pub fn uniqueness_experiment(
    omega0: &SpectralField,
    t_end: f64,
    params: &FlowParams,
    dt_list: &[f64],
    box_list: &[i64],
    s: f64,
    report_points: usize,
) -> Result<Vec<UniquenessRow>> {
    if dt_list.is_empty() || box_list.is_empty() || report_points == 0 {
        return Err(Error::param("resolution study needs nonempty dt and box lists"));
    }
    let times: Vec<f64> = (1..=report_points)
        .map(|j| t_end * j as f64 / report_points as f64)
        .collect();
    let dt_ref = dt_list.iter().copied().fold(f64::INFINITY, f64::min);
    let box_ref = *box_list.iter().max().expect("nonempty");
    let run = |dt: f64, b: i64| -> Result<Vec<(f64, SpectralField)>> {
        let flow = Flow::new(params.clone().with_box_radius(b)?)?;
        flow.evolve_to_times(&omega0.restrict_to_box(b)?, &times, dt)
    };
    let reference = run(dt_ref, box_ref)?;
    let mut rows = Vec::new();
    for &b in box_list {
        for &dt in dt_list {
            let traj = run(dt, b)?;
            let mut distance = 0.0f64;
            for ((_, a), (_, r)) in traj.iter().zip(&reference) {
                distance = distance.max(weighted_norm(&a.sub(r)?, 2.0, s)?);
            }
            let final_sobolev = weighted_norm(&traj.last().expect("report times").1, 2.0, s)?;
            rows.push(UniquenessRow {
                dt,
                box_radius: b,
                distance,
                final_sobolev,
            });
        }
    }
    Ok(rows)
}

/// Writes the state as a little-endian header `(d, k, N_box, count)` of
/// `u32`s followed by `count` records of `d` `i32` coordinates and the real
/// and imaginary parts as `f64`.
pub fn write_state_dump<W: Write>(mut out: W, omega: &SpectralField, k: usize) -> Result<()> {
    let header = [omega.dim(), k, omega.box_radius() as usize, omega.len()];
    for h in header {
        let h = u32::try_from(h).map_err(|_| Error::Overflow(format!("header value {h} exceeds u32")))?;
        out.write_all(&h.to_le_bytes())?;
    }
    for (n, v) in omega.iter() {
        for &c in n.coords() {
            let c = i32::try_from(c).map_err(|_| Error::Overflow(format!("coordinate {c} exceeds i32")))?;
            out.write_all(&c.to_le_bytes())?;
        }
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// Inverse of [`write_state_dump`]: returns `(k, field)`.
pub fn read_state_dump<R: Read>(mut input: R) -> Result<(usize, SpectralField)> {
    let mut u32buf = [0u8; 4];
    let mut header = [0usize; 4];
    for h in header.iter_mut() {
        input.read_exact(&mut u32buf)?;
        *h = u32::from_le_bytes(u32buf) as usize;
    }
    let [d, k, b, count] = header;
    let mut f = SpectralField::new(d, b as i64)?;
    let mut coords = vec![0i64; d];
    let mut f64buf = [0u8; 8];
    for _ in 0..count {
        for c in coords.iter_mut() {
            input.read_exact(&mut u32buf)?;
            *c = i32::from_le_bytes(u32buf) as i64;
        }
        input.read_exact(&mut f64buf)?;
        let re = f64::from_le_bytes(f64buf);
        input.read_exact(&mut f64buf)?;
        let im = f64::from_le_bytes(f64buf);
        f.insert(FreqVector::new(&coords)?, Complex64::new(re, im))?;
    }
    Ok((k, f))
}
