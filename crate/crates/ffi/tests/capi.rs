use std::ffi::{c_char, CStr, CString};
use std::ptr;

use polytorus_ffi::*;

fn last_error() -> String {
    let p = pt_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn one_plus_z_squared() -> *mut PtPolynomial {
    // 1 + 2z + z²
    let exps = [0u32, 1, 2];
    let re = [1.0, 2.0, 1.0];
    let mut out = ptr::null_mut();
    let st = unsafe { pt_polynomial_from_terms(1, 3, exps.as_ptr(), re.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, PtStatus::Ok);
    out
}

#[test]
fn norms_through_the_handle() {
    let p = one_plus_z_squared();
    let mut r = PtNormResult {
        value: 0.0,
        error_estimate: 0.0,
        method: PtMethod::Quadrature,
        converged: false,
        clamped_nodes: 0,
        near_unit_roots: false,
    };
    unsafe {
        assert_eq!(pt_lp_norm(p, 2.0, 0.0, &mut r), PtStatus::Ok);
        assert_eq!((r.value, r.method), (6f64.sqrt(), PtMethod::ExactParseval));
        assert!(pt_last_error_message().is_null());

        assert_eq!(pt_lp_norm(p, 1.0, 1e-10, &mut r), PtStatus::Ok);
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");

        assert_eq!(pt_mahler_measure(p, &mut r), PtStatus::Ok);
        assert!((r.value - 1.0).abs() < 1e-12 && r.method == PtMethod::ExactRoots);

        assert_eq!(pt_orlicz_norm(p, 0.5, &mut r), PtStatus::Ok);
        assert!(r.value > 0.0 && r.converged);

        let (mut nv, mut nt, mut deg) = (0usize, 0usize, 0u32);
        assert_eq!(pt_polynomial_shape(p, &mut nv, &mut nt, &mut deg), PtStatus::Ok);
        assert_eq!((nv, nt, deg), (1, 3, 2));

        let (mut vr, mut vi) = (0.0, 0.0);
        assert_eq!(pt_polynomial_evaluate(p, 1, [1.0].as_ptr(), [0.0].as_ptr(), &mut vr, &mut vi), PtStatus::Ok);
        assert_eq!((vr, vi), (4.0, 0.0));
        pt_polynomial_free(p);
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let p = one_plus_z_squared();
        let mut s: *mut c_char = ptr::null_mut();
        assert_eq!(pt_polynomial_to_json(p, &mut s), PtStatus::Ok);
        let mut q = ptr::null_mut();
        assert_eq!(pt_polynomial_from_json(s, &mut q), PtStatus::Ok);
        let mut s2: *mut c_char = ptr::null_mut();
        assert_eq!(pt_polynomial_to_json(q, &mut s2), PtStatus::Ok);
        assert_eq!(CStr::from_ptr(s), CStr::from_ptr(s2));
        pt_string_free(s);
        pt_string_free(s2);
        pt_polynomial_free(p);
        pt_polynomial_free(q);
    }
}

#[test]
fn lambda_values() {
    let mut l = PtLambda {
        gamma_form: 0.0,
        integral_form: 0.0,
        consistency_gap: 1.0,
    };
    assert_eq!(unsafe { pt_arestov_lambda(2.0, 2, &mut l) }, PtStatus::Ok);
    assert!((l.gamma_form - 6f64.sqrt()).abs() < 1e-12);
    assert!(l.consistency_gap < 1e-8);
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(pt_polynomial_from_json(ptr::null(), &mut out), PtStatus::NullPointer);
        assert!(last_error().contains("json"));

        let bad = CString::new("{not json").unwrap();
        assert_eq!(pt_polynomial_from_json(bad.as_ptr(), &mut out), PtStatus::Parse);
        assert!(out.is_null());

        let mut r = std::mem::MaybeUninit::<PtNormResult>::uninit();
        assert_eq!(pt_lp_norm(ptr::null(), 1.0, 0.0, r.as_mut_ptr()), PtStatus::NullPointer);

        let p = one_plus_z_squared();
        assert_eq!(pt_lp_norm(p, -1.0, 0.0, r.as_mut_ptr()), PtStatus::InvalidArgument);
        assert!(last_error().contains("exponent"));
        assert_eq!(pt_orlicz_norm(p, 0.0, r.as_mut_ptr()), PtStatus::InvalidArgument);
        assert_eq!(pt_lp_norm(p, 1.0, 0.0, ptr::null_mut()), PtStatus::NullPointer);

        let exps = [0u32, 1];
        let re = [1.0];
        assert_eq!(
            pt_polynomial_from_terms(0, 1, exps.as_ptr(), re.as_ptr(), ptr::null(), &mut out),
            PtStatus::InvalidArgument
        );
        pt_polynomial_free(p);
        pt_polynomial_free(ptr::null_mut());
        pt_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/polytorus.h")).unwrap();
    for name in [
        "typedef struct PtPolynomial PtPolynomial;",
        "PT_STATUS_OK = 0",
        "PT_STATUS_PANIC = 7",
        "pt_version",
        "pt_last_error_message",
        "pt_polynomial_from_json",
        "pt_polynomial_from_terms",
        "pt_polynomial_free",
        "pt_lp_norm",
        "pt_mahler_measure",
        "pt_orlicz_norm",
        "pt_arestov_lambda",
        "pt_string_free",
    ] {
        assert!(header.contains(name), "header lacks `{name}`");
    }
    let v = unsafe { CStr::from_ptr(pt_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn c_program_links_against_the_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libpolytorus_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler is on PATH");
    assert!(status.success());
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
