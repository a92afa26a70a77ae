//! C interface to `reslab`.
//!
//! Every function returns a [`ReslabStatus`]; on failure the message is
//! available from [`reslab_last_error`] on the same thread. Fields are opaque
//! [`ReslabField`] handles owned by the caller and released with
//! [`reslab_field_free`]. Vectors are passed as `d` consecutive `int64_t`
//! coordinates; tuples as `(2k+1) * d` coordinates.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use reslab::counting::{count_constrained, divisor_count, lcm_gcd_identity_check, CountQuery, CountTag};
use reslab::flow::{observables, read_state_dump, write_state_dump, Flow, FlowParams, Splitting};
use reslab::multilinear::{counterexample_family, estimate_ratio, EstimateSpec, EstimateTag};
use reslab::{phi, rank_and_classify, weighted_norm, Error, ExceptionalClass, FreqTuple, FreqVector, SpectralField};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReslabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Arity = 4,
    Unsupported = 5,
    Overflow = 6,
    Precondition = 7,
    Query = 8,
    DegenerateInput = 9,
    Budget = 10,
    Divergence = 11,
    Io = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReslabClass {
    NotInA = 0,
    InA1 = 1,
    InA2 = 2,
    InA3 = 3,
    InACubic = 4,
}

/// Opaque finitely supported field on `Z^d`.
pub struct ReslabField {
    inner: SpectralField,
}

/// Counting request; radii a lemma does not use are ignored.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ReslabCountQuery {
    /// NUL-terminated lemma name, e.g. "NumberA".
    pub tag: *const c_char,
    pub d: usize,
    /// `d` coordinates each, or null for the origin.
    pub n_star: *const i64,
    pub n_sub: *const i64,
    pub ball_center: *const i64,
    pub mu_star: i64,
    pub radius: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub eta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn reslab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

fn status_of(e: &Error) -> ReslabStatus {
    match e {
        Error::Dimension { .. } => ReslabStatus::Dimension,
        Error::Arity(_) => ReslabStatus::Arity,
        Error::UnsupportedCase(_) => ReslabStatus::Unsupported,
        Error::Parameter(_) | Error::Config { .. } => ReslabStatus::InvalidArgument,
        Error::Overflow(_) => ReslabStatus::Overflow,
        Error::Precondition(_) => ReslabStatus::Precondition,
        Error::Query(_) => ReslabStatus::Query,
        Error::DegenerateInput(_) => ReslabStatus::DegenerateInput,
        Error::Budget(_) => ReslabStatus::Budget,
        Error::Divergence { .. } => ReslabStatus::Divergence,
        Error::Io(_) => ReslabStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Engine(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Engine(e)
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> ReslabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ReslabStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            ReslabStatus::NullPointer
        }
        Ok(Err(Fail::Engine(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            ReslabStatus::Panic
        }
    }
}

fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

unsafe fn vector(p: *const i64, d: usize, what: &'static str) -> Result<FreqVector, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(FreqVector::new(std::slice::from_raw_parts(p, d))?)
}

unsafe fn vector_or_zero(p: *const i64, d: usize) -> Result<FreqVector, Fail> {
    if p.is_null() {
        Ok(FreqVector::zero(d))
    } else {
        vector(p, d, "vector")
    }
}

unsafe fn tuple(coords: *const i64, d: usize, len: usize) -> Result<FreqTuple, Fail> {
    if coords.is_null() {
        return Err(Fail::Null("tuple"));
    }
    let entries = (0..len)
        .map(|l| vector(coords.add(l * d), d, "tuple"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FreqTuple::new(entries)?)
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Engine(Error::Parameter(format!("{what} is not UTF-8"))))
}

fn boxed(f: SpectralField) -> *mut ReslabField {
    Box::into_raw(Box::new(ReslabField { inner: f }))
}

unsafe fn fields<'a>(handles: *const *const ReslabField, count: usize) -> Result<Vec<&'a SpectralField>, Fail> {
    if handles.is_null() {
        return Err(Fail::Null("fields"));
    }
    std::slice::from_raw_parts(handles, count)
        .iter()
        .map(|h| nonnull(*h, "field").map(|f| &f.inner))
        .collect()
}

/// Empty field on the box `|n|_inf <= box_radius` in `Z^d`.
#[no_mangle]
pub extern "C" fn reslab_field_new(d: usize, box_radius: i64, out_field: *mut *mut ReslabField) -> ReslabStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        *slot = boxed(SpectralField::new(d, box_radius)?);
        Ok(())
    })
}

/// Releases a field; null is ignored.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_free(field: *mut ReslabField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle; `coords` must point to `dim` values.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_set(field: *mut ReslabField, coords: *const i64, re: f64, im: f64) -> ReslabStatus {
    guard(|| {
        let f = out(field, "field")?;
        let n = vector(coords, f.inner.dim(), "coords")?;
        f.inner.insert(n, Complex64::new(re, im))?;
        Ok(())
    })
}

/// # Safety
/// `field` must be a live handle; `coords` must point to `dim` values.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_get(
    field: *const ReslabField,
    coords: *const i64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> ReslabStatus {
    guard(|| {
        let f = nonnull(field, "field")?;
        let n = vector(coords, f.inner.dim(), "coords")?;
        let v = f.inner.get(&n);
        *out(out_re, "out_re")? = v.re;
        *out(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// Support size, or 0 for null.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_len(field: *const ReslabField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.len())
}

/// Dimension, or 0 for null.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_dim(field: *const ReslabField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.dim())
}

/// `||f||_{l^p_s}`; pass `p = INFINITY` for the sup norm.
///
/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_norm(field: *const ReslabField, p: f64, s: f64, out_norm: *mut f64) -> ReslabStatus {
    guard(|| {
        let f = nonnull(field, "field")?;
        *out(out_norm, "out_norm")? = weighted_norm(&f.inner, p, s)?;
        Ok(())
    })
}

/// Resonance function of the output `n` against a `(2k+1)`-tuple.
///
/// # Safety
/// `n` must hold `d` values and `tuple_coords` `tuple_len * d` values.
#[no_mangle]
pub unsafe extern "C" fn reslab_phi(
    d: usize,
    n: *const i64,
    tuple_coords: *const i64,
    tuple_len: usize,
    out_phi: *mut i64,
) -> ReslabStatus {
    guard(|| {
        let n = vector(n, d, "n")?;
        let t = tuple(tuple_coords, d, tuple_len)?;
        *out(out_phi, "out_phi")? = phi(&n, &t)?;
        Ok(())
    })
}

/// Exceptional-set class of a `(2k+1)`-tuple; `out_ranks`, if not null,
/// receives the 0-based slot of `n_[m]` at index `m - 1`.
///
/// # Safety
/// `tuple_coords` must hold `(2k+1) * d` values and `out_ranks`, if not null,
/// room for `2k+1` values.
#[no_mangle]
pub unsafe extern "C" fn reslab_classify(
    d: usize,
    k: usize,
    tuple_coords: *const i64,
    out_class: *mut ReslabClass,
    out_ranks: *mut usize,
) -> ReslabStatus {
    guard(|| {
        let t = tuple(tuple_coords, d, 2 * k + 1)?;
        let profile = rank_and_classify(&t, d, k)?;
        *out(out_class, "out_class")? = match profile.class {
            ExceptionalClass::NotInA => ReslabClass::NotInA,
            ExceptionalClass::InA1 => ReslabClass::InA1,
            ExceptionalClass::InA2 => ReslabClass::InA2,
            ExceptionalClass::InA3 => ReslabClass::InA3,
            ExceptionalClass::InACubic => ReslabClass::InACubic,
        };
        if !out_ranks.is_null() {
            std::slice::from_raw_parts_mut(out_ranks, profile.permutation.len()).copy_from_slice(&profile.permutation);
        }
        Ok(())
    })
}

/// Exact count and the lemma's bound (constant 1).
///
/// # Safety
/// `query` must be valid; its vector pointers null or holding `d` values.
#[no_mangle]
pub unsafe extern "C" fn reslab_count(
    query: *const ReslabCountQuery,
    out_count: *mut u64,
    out_bound: *mut f64,
) -> ReslabStatus {
    guard(|| {
        let q = nonnull(query, "query")?;
        let tag: CountTag = string(q.tag, "tag")?.parse()?;
        let cq = CountQuery::new(tag, q.d)?
            .with_n_star(vector_or_zero(q.n_star, q.d)?)
            .with_n_sub(vector_or_zero(q.n_sub, q.d)?)
            .with_ball_center(vector_or_zero(q.ball_center, q.d)?)
            .with_mu_star(q.mu_star)
            .with_radius(q.radius)
            .with_radii(q.r1, q.r2, q.r3);
        let report = count_constrained(&cq, q.eta)?;
        *out(out_count, "out_count")? = report.exact_count;
        if !out_bound.is_null() {
            *out_bound = report.bound_value;
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn reslab_divisor_count(n: i64, out_count: *mut u64) -> ReslabStatus {
    guard(|| {
        *out(out_count, "out_count")? = divisor_count(n)?;
        Ok(())
    })
}

/// Sets `out_holds` to 1 when `lcm(a,b,c) gcd(a,b) gcd(a,c) gcd(b,c) = abc gcd(a,b,c)`.
#[no_mangle]
pub extern "C" fn reslab_lcm_gcd_identity(a: u64, b: u64, c: u64, out_holds: *mut i32) -> ReslabStatus {
    guard(|| {
        *out(out_holds, "out_holds")? = lcm_gcd_identity_check(a, b, c)? as i32;
        Ok(())
    })
}

/// Estimate ratio LHS/RHS for the named estimate. `q = 0` minimizes over the
/// distinguished slot; `has_mu = 0` takes the supremum over levels.
///
/// # Safety
/// `tag` must be a NUL-terminated string and `field_handles` hold `count` live handles.
#[no_mangle]
pub unsafe extern "C" fn reslab_estimate_ratio(
    tag: *const c_char,
    s: f64,
    q: usize,
    has_mu: i32,
    mu: i64,
    field_handles: *const *const ReslabField,
    count: usize,
    out_ratio: *mut f64,
) -> ReslabStatus {
    guard(|| {
        let tag: EstimateTag = string(tag, "tag")?.parse()?;
        let fs: Vec<SpectralField> = fields(field_handles, count)?.into_iter().cloned().collect();
        if fs.is_empty() || count.is_multiple_of(2) {
            return Err(Error::Arity(format!("{count} fields is not of the form 2k+1")).into());
        }
        let mut spec = EstimateSpec::new(tag, fs[0].dim(), (count - 1) / 2, s)?;
        if q != 0 {
            spec = spec.with_q(q)?;
        }
        if has_mu != 0 {
            spec = spec.with_mu(mu);
        }
        *out(out_ratio, "out_ratio")? = estimate_ratio(&spec, &fs)?;
        Ok(())
    })
}

/// The three fields of the `l^inf` counterexample family (`d = 2, k = 1`).
///
/// # Safety
/// `out_fields` must have room for three handles.
#[no_mangle]
pub unsafe extern "C" fn reslab_counterexample(big_n: i64, out_fields: *mut *mut ReslabField) -> ReslabStatus {
    guard(|| {
        if out_fields.is_null() {
            return Err(Fail::Null("out_fields"));
        }
        let fam = counterexample_family(big_n)?;
        for (i, f) in fam.fields.into_iter().enumerate() {
            *out_fields.add(i) = boxed(f);
        }
        Ok(())
    })
}

/// Integrates the truncated flow to `t_end` with RK4 steps of at most `dt`
/// and returns the final state as a new field. `splitting` is "Full",
/// "PrincipalAc" or "RemainderR" (null means "Full").
///
/// # Safety
/// `omega0` must be a live handle; `splitting` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn reslab_evolve(
    k: usize,
    lambda_re: f64,
    lambda_im: f64,
    box_radius: i64,
    splitting: *const c_char,
    omega0: *const ReslabField,
    t_end: f64,
    dt: f64,
    out_field: *mut *mut ReslabField,
) -> ReslabStatus {
    guard(|| {
        let w0 = &nonnull(omega0, "omega0")?.inner;
        let slot = out(out_field, "out_field")?;
        let sp = if splitting.is_null() {
            Splitting::Full
        } else {
            string(splitting, "splitting")?.parse()?
        };
        let mut params =
            FlowParams::new(w0.dim(), k, Complex64::new(lambda_re, lambda_im), box_radius)?.with_splitting(sp)?;
        params.stride = usize::MAX;
        let traj = Flow::new(params)?.evolve(w0, t_end, dt)?;
        *slot = boxed(traj.into_iter().last().expect("initial snapshot").1);
        Ok(())
    })
}

/// Mass `sum |w|^2` and `||w||_{l^2_s}`.
///
/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn reslab_observables(
    field: *const ReslabField,
    s: f64,
    out_mass: *mut f64,
    out_sobolev: *mut f64,
) -> ReslabStatus {
    guard(|| {
        let f = nonnull(field, "field")?;
        let (m, sob) = observables(&f.inner, s)?;
        *out(out_mass, "out_mass")? = m;
        *out(out_sobolev, "out_sobolev")? = sob;
        Ok(())
    })
}

/// Writes the binary state dump.
///
/// # Safety
/// `field` must be a live handle and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_dump(field: *const ReslabField, k: usize, path: *const c_char) -> ReslabStatus {
    guard(|| {
        let f = nonnull(field, "field")?;
        let path = string(path, "path")?;
        let file = File::create(path).map_err(Error::from)?;
        write_state_dump(BufWriter::new(file), &f.inner, k)?;
        Ok(())
    })
}

/// Reads a binary state dump into a new field.
///
/// # Safety
/// `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn reslab_field_load(
    path: *const c_char,
    out_k: *mut usize,
    out_field: *mut *mut ReslabField,
) -> ReslabStatus {
    guard(|| {
        let path = string(path, "path")?;
        let slot = out(out_field, "out_field")?;
        let file = File::open(path).map_err(Error::from)?;
        let (k, f) = read_state_dump(BufReader::new(file))?;
        if !out_k.is_null() {
            *out_k = k;
        }
        *slot = boxed(f);
        Ok(())
    })
}
