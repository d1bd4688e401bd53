use std::ffi::{CStr, CString};
use std::ptr;

use torsion_forge_ffi::*;

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    tf_string_free(s);
    out
}

fn last_error() -> String {
    let p = tf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(tf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn count_points() {
    unsafe {
        let mut s = ptr::null_mut();
        // q = 9 over F_9: 9 affine points plus infinity.
        assert_eq!(tf_count_points(3, 1, 1, 0, &mut s), TfStatus::Ok);
        assert_eq!(take(s), "10");
        assert_eq!(tf_count_points(4, 1, 1, 0, &mut s), TfStatus::InvalidArgument);
        assert!(last_error().contains("not prime"));
        assert_eq!(tf_count_points(3, 1, 0, 0, &mut s), TfStatus::InvalidArgument);
        assert_eq!(tf_count_points(3, 1, 1, 0, ptr::null_mut()), TfStatus::NullPointer);
    }
}

#[test]
fn rank_reports() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(tf_rank_new(5, 3, 2, 0, &mut r), TfStatus::Ok);
        assert!(tf_rank_is_exact(r));
        let mut s = ptr::null_mut();
        assert_eq!(tf_rank_value(r, &mut s), TfStatus::Ok);
        assert_eq!(take(s), "156");
        let (mut lo, mut hi) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(tf_rank_interval(r, &mut lo, &mut hi), TfStatus::Ok);
        let (lo, hi) = (take(lo).parse::<u64>().unwrap(), take(hi).parse::<u64>().unwrap());
        assert!(lo <= 156 && 156 <= hi);
        tf_rank_free(r);

        // Far beyond any counting budget: only the bracket is available.
        let mut r = ptr::null_mut();
        assert_eq!(tf_rank_new(5, 3, 1000, 1 << 12, &mut r), TfStatus::Ok);
        assert!(!tf_rank_is_exact(r));
        assert_eq!(tf_rank_value(r, &mut s), TfStatus::InvalidArgument);
        tf_rank_free(r);

        // ell = 2 is outside the family.
        assert_eq!(tf_rank_new(5, 2, 2, 0, &mut r), TfStatus::Inadmissible);
        assert!(!last_error().is_empty());
        assert!(!tf_rank_is_exact(ptr::null()));
        assert_eq!(tf_rank_value(ptr::null(), &mut s), TfStatus::NullPointer);
        tf_rank_free(ptr::null_mut());
    }
}

#[test]
fn models_and_group_law() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(tf_model_new_artin_schreier(3, 2, 9, &mut m), TfStatus::Ok);
        assert_eq!(tf_model_genus(m), 4);

        let (mut a, mut b, mut zero) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(tf_divisor_random(m, 1, &mut a), TfStatus::Ok);
        assert_eq!(tf_divisor_random(m, 2, &mut b), TfStatus::Ok);
        assert_eq!(tf_divisor_identity(m, &mut zero), TfStatus::Ok);
        assert!(tf_divisor_is_identity(zero));
        assert!(tf_divisor_weight(a) <= 4);

        let (mut ab, mut ba) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(tf_divisor_add(m, a, b, &mut ab), TfStatus::Ok);
        assert_eq!(tf_divisor_add(m, b, a, &mut ba), TfStatus::Ok);
        assert!(tf_divisor_equal(ab, ba));

        let mut neg = ptr::null_mut();
        let mut sum = ptr::null_mut();
        assert_eq!(tf_divisor_negate(m, a, &mut neg), TfStatus::Ok);
        assert_eq!(tf_divisor_add(m, a, neg, &mut sum), TfStatus::Ok);
        assert!(tf_divisor_is_identity(sum));

        // #J(F_9) = 4096 for this curve.
        let n = CString::new("4096").unwrap();
        let mut na = ptr::null_mut();
        assert_eq!(tf_divisor_scalar_mul(m, n.as_ptr(), a, &mut na), TfStatus::Ok);
        assert!(tf_divisor_is_identity(na));
        let bad = CString::new("-3").unwrap();
        assert_eq!(tf_divisor_scalar_mul(m, bad.as_ptr(), a, &mut na), TfStatus::InvalidArgument);

        // A divisor from another model is rejected rather than misused.
        let mut other = ptr::null_mut();
        let h = [1u64, 3, 0, 0, 0, 1];
        assert_eq!(tf_model_new_prime_coeffs(7, 1, h.as_ptr(), h.len(), 1, &mut other), TfStatus::Ok);
        assert_eq!(tf_model_genus(other), 2);
        let mut x = ptr::null_mut();
        assert_ne!(tf_divisor_add(other, a, a, &mut x), TfStatus::Ok);

        for d in [a, b, zero, ab, ba, neg, sum, na] {
            tf_divisor_free(d);
        }
        tf_model_free(other);
        tf_model_free(m);
    }
}

#[test]
fn rejects_singular_and_even_models() {
    unsafe {
        let mut m = ptr::null_mut();
        // x^5 + x + 1 has a double root over F_7.
        let h = [1u64, 1, 0, 0, 0, 1];
        assert_eq!(tf_model_new_prime_coeffs(7, 1, h.as_ptr(), h.len(), 1, &mut m), TfStatus::InvalidArgument);
        let even = [1u64, 0, 0, 0, 1];
        assert_eq!(tf_model_new_prime_coeffs(7, 1, even.as_ptr(), even.len(), 1, &mut m), TfStatus::InvalidArgument);
        assert_eq!(tf_model_new_prime_coeffs(7, 1, ptr::null(), 0, 1, &mut m), TfStatus::NullPointer);
    }
}

fn run(args: &[&str]) -> (TfStatus, i32, Option<String>) {
    let owned: Vec<CString> = args.iter().map(|a| CString::new(*a).unwrap()).collect();
    let argv: Vec<*const std::ffi::c_char> = owned.iter().map(|a| a.as_ptr()).collect();
    let mut out = ptr::null_mut();
    let mut code = -1;
    let status = unsafe { tf_run(argv.as_ptr(), argv.len(), &mut out, &mut code) };
    let text = (status == TfStatus::Ok).then(|| unsafe { take(out) });
    (status, code, text)
}

#[test]
fn command_runner() {
    let (status, code, text) = run(&["rank", "--p", "5", "--ell", "3", "--m", "2"]);
    assert_eq!((status, code), (TfStatus::Ok, 0));
    let text = text.unwrap();
    assert!(text.contains("\"rank\": \"156\""), "{text}");

    let (status, code, _) = run(&["rank", "--p", "5", "--ell", "2", "--m", "2"]);
    assert_eq!((status, code), (TfStatus::InvalidArgument, 2));
    let (status, code, _) = run(&["no-such-command"]);
    assert_eq!((status, code), (TfStatus::InvalidArgument, 2));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/torsion_forge.h");
    for name in [
        "tf_version",
        "tf_last_error",
        "tf_string_free",
        "tf_count_points",
        "tf_rank_new",
        "tf_rank_is_exact",
        "tf_rank_value",
        "tf_rank_interval",
        "tf_rank_free",
        "tf_model_new_artin_schreier",
        "tf_model_new_prime_coeffs",
        "tf_model_genus",
        "tf_model_free",
        "tf_divisor_identity",
        "tf_divisor_random",
        "tf_divisor_add",
        "tf_divisor_negate",
        "tf_divisor_scalar_mul",
        "tf_divisor_is_identity",
        "tf_divisor_equal",
        "tf_divisor_weight",
        "tf_divisor_free",
        "tf_run",
        "TF_STATUS_BUDGET_EXCEEDED",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
