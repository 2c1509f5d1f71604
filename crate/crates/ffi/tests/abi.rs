use std::ffi::{CStr, CString};
use std::ptr;

use angmom_ffi::*;

fn last_error() -> String {
    let p = am_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { am_string_free(p) };
    s
}

#[test]
fn two_level_preparation() {
    unsafe {
        let mut zero = ptr::null_mut();
        assert_eq!(am_wavefunction_basis(7, 0, &mut zero), AmStatus::Ok);
        let ls = [-1i64, 1];
        let re = [1.0f64, 1.0];
        let mut psi = ptr::null_mut();
        assert_eq!(
            am_wavefunction_from_terms(7, ls.as_ptr(), re.as_ptr(), ptr::null(), 2, &mut psi),
            AmStatus::Ok
        );
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(am_wavefunction_amp(psi, 1, &mut a, &mut b), AmStatus::Ok);
        assert!((a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15 && b == 0.0);

        let labels = [AmLabel::Preparer, AmLabel::System];
        let parts = [zero as *const _, zero as *const _];
        let mut s0 = ptr::null_mut();
        assert_eq!(am_state_product(labels.as_ptr(), parts.as_ptr(), 2, &mut s0), AmStatus::Ok);
        let mut s1 = ptr::null_mut();
        assert_eq!(
            am_state_shift_prepare(s0, AmLabel::Preparer, AmLabel::System, psi, &mut s1),
            AmStatus::Ok
        );

        let mut h = 0.0;
        assert_eq!(am_state_entropy(s1, AmLabel::System, &mut h), AmStatus::Ok);
        assert!((h - 1.0).abs() < 1e-9);

        let scope = [AmLabel::Preparer, AmLabel::System];
        let mut p = 0.0;
        assert_eq!(am_state_total_probability(s1, scope.as_ptr(), 2, 0, &mut p), AmStatus::Ok);
        assert!((p - 1.0).abs() < 1e-12);

        am_state_free(s1);
        am_state_free(s0);
        am_wavefunction_free(psi);
        am_wavefunction_free(zero);
    }
}

#[test]
fn errors_set_message() {
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(am_wavefunction_basis(0, 0, &mut w), AmStatus::InvalidArgument);
        assert!(w.is_null());
        assert!(last_error().contains("positive"));

        assert_eq!(am_wavefunction_basis(3, 0, ptr::null_mut()), AmStatus::NullPointer);
        let mut h = 0.0;
        assert_eq!(am_state_entropy(ptr::null(), AmLabel::System, &mut h), AmStatus::NullPointer);
    }
}

#[test]
fn wrap_is_reported() {
    unsafe {
        let (mut edge, mut zero, mut up) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        am_wavefunction_basis(5, -2, &mut edge);
        am_wavefunction_basis(5, 0, &mut zero);
        am_wavefunction_basis(5, 1, &mut up);
        let labels = [AmLabel::Preparer, AmLabel::System];
        let parts = [edge as *const _, zero as *const _];
        let mut s = ptr::null_mut();
        am_state_product(labels.as_ptr(), parts.as_ptr(), 2, &mut s);
        let mut out = ptr::null_mut();
        assert_eq!(
            am_state_shift_prepare(s, AmLabel::Preparer, AmLabel::System, up, &mut out),
            AmStatus::Wrap
        );
        assert!(out.is_null());
        am_state_free(s);
        for w in [edge, zero, up] {
            am_wavefunction_free(w);
        }
    }
}

#[test]
fn scenario_runner() {
    let toml = CString::new(angmom::scenario::BUNDLED[1].1).unwrap();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(am_run_scenario(toml.as_ptr(), &mut json), AmStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        am_string_free(json);
        let report = angmom::report::Report::from_json(&text).unwrap();
        assert_eq!(report.outcomes.len(), 2);

        let bad = CString::new("name = ").unwrap();
        let mut json = ptr::null_mut();
        assert_eq!(am_run_scenario(bad.as_ptr(), &mut json), AmStatus::Config);
        assert!(json.is_null());
    }
}

#[test]
fn header_declares_exports() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/angmom.h")).unwrap();
    for f in [
        "am_last_error_message",
        "am_string_free",
        "am_wavefunction_basis",
        "am_wavefunction_from_terms",
        "am_state_product",
        "am_state_shift_prepare",
        "am_state_pointer_couple",
        "am_state_swap",
        "am_run_scenario",
        "typedef struct AmState AmState",
        "AM_STATUS_INVARIANT_VIOLATION = 7",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
}
