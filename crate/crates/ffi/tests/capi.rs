use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use reslab_ffi::*;

fn last_error() -> String {
    let p = reslab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn delta0(d: usize) -> *mut ReslabField {
    let mut f = ptr::null_mut();
    assert_eq!(reslab_field_new(d, 0, &mut f), ReslabStatus::Ok);
    let zero = vec![0i64; d];
    assert_eq!(unsafe { reslab_field_set(f, zero.as_ptr(), 1.0, 0.0) }, ReslabStatus::Ok);
    f
}

#[test]
fn field_lifecycle() {
    let mut f = ptr::null_mut();
    assert_eq!(reslab_field_new(2, 3, &mut f), ReslabStatus::Ok);
    let n = [1i64, -2];
    unsafe {
        assert_eq!(reslab_field_set(f, n.as_ptr(), 3.0, 4.0), ReslabStatus::Ok);
        assert_eq!(reslab_field_len(f), 1);
        assert_eq!(reslab_field_dim(f), 2);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(reslab_field_get(f, n.as_ptr(), &mut re, &mut im), ReslabStatus::Ok);
        assert_eq!((re, im), (3.0, 4.0));
        let mut norm = 0.0;
        assert_eq!(reslab_field_norm(f, 2.0, 0.0, &mut norm), ReslabStatus::Ok);
        assert_eq!(norm, 5.0);
        let outside = [4i64, 0];
        assert_eq!(reslab_field_set(f, outside.as_ptr(), 1.0, 0.0), ReslabStatus::Precondition);
        assert!(!last_error().is_empty());
        reslab_field_free(f);
        reslab_field_free(ptr::null_mut());
        assert_eq!(reslab_field_len(ptr::null()), 0);
    }
}

#[test]
fn null_and_bad_arguments() {
    assert_eq!(reslab_field_new(2, 1, ptr::null_mut()), ReslabStatus::NullPointer);
    assert!(last_error().contains("out_field"));
    let mut f = ptr::null_mut();
    assert_eq!(reslab_field_new(9, 1, &mut f), ReslabStatus::InvalidArgument);
    assert!(f.is_null());
    let mut c = 0;
    assert_eq!(reslab_divisor_count(0, &mut c), ReslabStatus::InvalidArgument);
}

#[test]
fn phi_and_classify() {
    let n = [0i64, 0];
    let t = [1i64, 0, 1, 0, 0, 0];
    let mut out = 0;
    unsafe {
        assert_eq!(reslab_phi(2, n.as_ptr(), t.as_ptr(), 3, &mut out), ReslabStatus::Ok);
        assert_eq!(out, 0);
        let mut class = ReslabClass::NotInA;
        let mut ranks = [0usize; 3];
        assert_eq!(reslab_classify(2, 1, t.as_ptr(), &mut class, ranks.as_mut_ptr()), ReslabStatus::Ok);
        assert_eq!(class, ReslabClass::InACubic);
        let mut sorted = ranks;
        sorted.sort();
        assert_eq!(sorted, [0, 1, 2]);
        assert_eq!(reslab_phi(2, n.as_ptr(), t.as_ptr(), 2, &mut out), ReslabStatus::Arity);
        assert_eq!(reslab_classify(1, 1, t.as_ptr(), &mut class, ptr::null_mut()), ReslabStatus::Unsupported);
    }
}

#[test]
fn counting_and_arithmetic() {
    let tag = CString::new("NumberA").unwrap();
    let q = ReslabCountQuery {
        tag: tag.as_ptr(),
        d: 2,
        n_star: ptr::null(),
        n_sub: ptr::null(),
        ball_center: ptr::null(),
        mu_star: 25,
        radius: 6.0,
        r1: 0.0,
        r2: 0.0,
        r3: 0.0,
        eta: 0.25,
    };
    let (mut c, mut b) = (0u64, 0.0);
    unsafe {
        assert_eq!(reslab_count(&q, &mut c, &mut b), ReslabStatus::Ok);
    }
    assert_eq!(c, 12);
    assert!(b > 0.0);
    let bad = CString::new("NumberZ").unwrap();
    let q2 = ReslabCountQuery { tag: bad.as_ptr(), ..q };
    assert_eq!(unsafe { reslab_count(&q2, &mut c, ptr::null_mut()) }, ReslabStatus::InvalidArgument);
    let q3 = ReslabCountQuery { radius: f64::INFINITY, ..q };
    assert_eq!(unsafe { reslab_count(&q3, &mut c, ptr::null_mut()) }, ReslabStatus::Query);

    assert_eq!(reslab_divisor_count(12, &mut c), ReslabStatus::Ok);
    assert_eq!(c, 6);
    let mut holds = 0;
    assert_eq!(reslab_lcm_gcd_identity(12, 18, 30, &mut holds), ReslabStatus::Ok);
    assert_eq!(holds, 1);
}

#[test]
fn estimates_and_counterexample() {
    let fs: Vec<*mut ReslabField> = (0..3).map(|_| delta0(2)).collect();
    let handles: Vec<*const ReslabField> = fs.iter().map(|&p| p as *const _).collect();
    let tag = CString::new("B1").unwrap();
    let mut ratio = 0.0;
    unsafe {
        assert_eq!(
            reslab_estimate_ratio(tag.as_ptr(), 0.6, 0, 0, 0, handles.as_ptr(), 3, &mut ratio),
            ReslabStatus::Ok
        );
        assert_eq!(ratio, 1.0);
        assert_eq!(
            reslab_estimate_ratio(tag.as_ptr(), 0.6, 0, 0, 0, handles.as_ptr(), 2, &mut ratio),
            ReslabStatus::Arity
        );
        for f in fs {
            reslab_field_free(f);
        }

        let mut fam = [ptr::null_mut(); 3];
        assert_eq!(reslab_counterexample(2, fam.as_mut_ptr()), ReslabStatus::Ok);
        assert_eq!(fam.map(|f| reslab_field_len(f)), [5, 25, 5]);
        let linf = CString::new("LinfBlock").unwrap();
        let handles: Vec<*const ReslabField> = fam.iter().map(|&p| p as *const _).collect();
        assert_eq!(
            reslab_estimate_ratio(linf.as_ptr(), 0.25, 2, 1, 0, handles.as_ptr(), 3, &mut ratio),
            ReslabStatus::Ok
        );
        assert!(ratio > 0.0);
        for f in fam {
            reslab_field_free(f);
        }
    }
}

#[test]
fn evolve_observables_and_dump() {
    let mut w0 = ptr::null_mut();
    assert_eq!(reslab_field_new(1, 2, &mut w0), ReslabStatus::Ok);
    for (i, a) in [(-1i64, 0.2), (0, 0.5), (2, 0.1)] {
        assert_eq!(unsafe { reslab_field_set(w0, [i].as_ptr(), a, 0.1) }, ReslabStatus::Ok);
    }
    let mut w1 = ptr::null_mut();
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("state.bin").to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(
            reslab_evolve(1, 1.0, 0.0, 2, ptr::null(), w0, 0.1, 1e-3, &mut w1),
            ReslabStatus::Ok
        );
        let (mut m0, mut m1, mut s) = (0.0, 0.0, 0.0);
        assert_eq!(reslab_observables(w0, 1.0, &mut m0, &mut s), ReslabStatus::Ok);
        assert_eq!(reslab_observables(w1, 1.0, &mut m1, &mut s), ReslabStatus::Ok);
        assert!(((m1 - m0) / m0).abs() < 1e-10);

        assert_eq!(reslab_field_dump(w1, 1, path.as_ptr()), ReslabStatus::Ok);
        let (mut k, mut back) = (0usize, ptr::null_mut());
        assert_eq!(reslab_field_load(path.as_ptr(), &mut k, &mut back), ReslabStatus::Ok);
        assert_eq!(k, 1);
        for i in -2..=2i64 {
            let (mut a, mut b, mut c, mut e) = (0.0, 0.0, 0.0, 0.0);
            reslab_field_get(w1, [i].as_ptr(), &mut a, &mut b);
            reslab_field_get(back, [i].as_ptr(), &mut c, &mut e);
            assert_eq!((a, b), (c, e));
        }
        let sp = CString::new("PrincipalAc").unwrap();
        let mut w2 = ptr::null_mut();
        assert_eq!(
            reslab_evolve(1, 1.0, 0.0, 2, sp.as_ptr(), w0, 0.1, 1e-3, &mut w2),
            ReslabStatus::Unsupported
        );
        let missing = CString::new(dir.path().join("none.bin").to_str().unwrap()).unwrap();
        assert_eq!(reslab_field_load(missing.as_ptr(), &mut k, &mut w2), ReslabStatus::Io);
        for f in [w0, w1, back] {
            reslab_field_free(f);
        }
    }
}

#[test]
fn header_is_valid_c() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = include.join("reslab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["reslab_field_new", "reslab_count", "reslab_evolve", "RESLAB_STATUS_OK", "ReslabField"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"reslab.h\"\nint probe(void) { ReslabField *f = 0; return (int)reslab_field_new(1, 1, &f); }\n",
    )
    .unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(&include).arg(&src).status() {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(e) => eprintln!("no C compiler available ({e}); skipping syntax check"),
    }
}
