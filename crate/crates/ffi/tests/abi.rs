use std::ffi::{CStr, CString};
use std::os::raw::c_int;
use std::ptr;

use cbound_ffi::*;

fn last_error() -> String {
    let p = cb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn preset(name: &str) -> *mut CbPotential {
    let name = CString::new(name).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cb_potential_preset(name.as_ptr(), &mut p) }, CbStatus::Ok);
    p
}

#[test]
fn solves_a_preset_through_the_abi() {
    unsafe {
        let p = preset("poschl-teller");
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(cb_potential_eval(p, 0.0, &mut re, &mut im), CbStatus::Ok);
        assert_eq!((re, im), (-4.0, 0.0));

        let mut r = ptr::null_mut();
        assert_eq!(cb_solve(p, ptr::null(), &mut r), CbStatus::Ok);
        assert_eq!(cb_result_len(r), 1);
        let (mut e, mut res) = (0.0, 0.0);
        assert_eq!(cb_result_energy(r, 0, &mut e, &mut res), CbStatus::Ok);
        assert!((e + 1.0).abs() < 1e-6 && res < 1e-4);

        let mut n = 0;
        assert_eq!(cb_result_state_len(r, 0, &mut n), CbStatus::Ok);
        let (mut x, mut psr, mut psi) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        assert_eq!(cb_result_state_copy(r, 0, x.as_mut_ptr(), psr.as_mut_ptr(), psi.as_mut_ptr(), n), CbStatus::Ok);
        let h = x[1] - x[0];
        let norm: f64 = psr.iter().zip(&psi).map(|(a, b)| a * a + b * b).sum::<f64>() * h;
        assert!((norm - 1.0).abs() < 1e-3, "{norm}");
        assert_eq!(cb_result_state_copy(r, 0, x.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), n - 1), CbStatus::InvalidArgument);

        let mut s = ptr::null_mut();
        assert_eq!(cb_result_to_json(r, &mut s), CbStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert_eq!(doc["schema"], "v1");
        cb_string_free(s);
        cb_result_free(r);
        cb_potential_free(p);
    }
}

#[test]
fn options_select_method_and_window() {
    unsafe {
        let p = preset("cubic-oscillator");
        let mut o = cb_solve_options_default();
        o.window_lo = 0.0;
        o.window_hi = 8.0;
        let mut r = ptr::null_mut();
        assert_eq!(cb_solve(p, &o, &mut r), CbStatus::Ok);
        assert_eq!(cb_result_len(r), 2);
        cb_result_free(r);

        o.method = CbMethod::Transfer;
        let mut r = ptr::null_mut();
        assert_eq!(cb_solve(p, &o, &mut r), CbStatus::Config);
        assert!(r.is_null());
        assert!(!last_error().is_empty());
        cb_potential_free(p);
    }
}

#[test]
fn null_pointers_and_bad_input_are_reported() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(cb_solve(ptr::null(), ptr::null(), &mut r), CbStatus::InvalidArgument);
        assert!(last_error().contains("potential"));
        assert_eq!(cb_result_len(ptr::null()), 0);
        let mut e = 0.0;
        assert_eq!(cb_result_energy(ptr::null(), 0, &mut e, ptr::null_mut()), CbStatus::InvalidArgument);

        let mut p = ptr::null_mut();
        let name = CString::new("no-such-preset").unwrap();
        assert_ne!(cb_potential_preset(name.as_ptr(), &mut p), CbStatus::Ok);
        let bad = CString::new("{\"family\": \"poschl_teller\", \"params\": {\"kappa\": -1}}").unwrap();
        assert_eq!(cb_potential_from_json(bad.as_ptr(), &mut p), CbStatus::Config);
        assert!(p.is_null());

        cb_potential_free(ptr::null_mut());
        cb_result_free(ptr::null_mut());
        cb_string_free(ptr::null_mut());
    }
}

#[test]
fn builds_from_json() {
    unsafe {
        let json = CString::new("{\"family\": \"poschl_teller\", \"params\": {\"kappa\": 1.5}}").unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(cb_potential_from_json(json.as_ptr(), &mut p), CbStatus::Ok, "{}", last_error());
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(cb_potential_eval(p, 0.0, &mut re, &mut im), CbStatus::Ok);
        assert!((re + 2.25).abs() < 1e-12);
        cb_potential_free(p);
    }
}

#[test]
fn darboux_family_and_zero_counts() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(cb_darboux(2.0, 0.0, 1.7, 4, 10.0, 1e-3, &mut r), CbStatus::Ok);
        assert_eq!(cb_result_len(r), 5);
        for i in 0..5 {
            let mut e = 0.0;
            cb_result_energy(r, i, &mut e, ptr::null_mut());
            assert_eq!(e, 2.0 * i as f64 - 1.0);
            let (mut nr, mut ni, mut il): (usize, usize, c_int) = (0, 0, 0);
            assert_eq!(cb_result_zero_counts(r, i, 0.0, &mut nr, &mut ni, &mut il), CbStatus::Ok);
            assert_eq!(il, 1);
            if i > 0 {
                assert_eq!((nr, ni), (i, i - 1));
            }
        }
        cb_result_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(cb_darboux(1.0, 0.0, 0.0, 4, 10.0, 1e-3, &mut r), CbStatus::Config);
        assert!(r.is_null());
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(cb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
