use std::ffi::{CStr, CString};
use std::ptr;

use stabrad_ffi::*;

fn last_error() -> String {
    let p = stabrad_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn grcar_sparsity_radius() {
    unsafe {
        let a = stabrad_matrix_grcar(10, 1.0);
        assert!(!a.is_null());
        assert_eq!(stabrad_matrix_dim(a), 10);
        let s = stabrad_structure_sparsity_real(a);
        let mut r = ptr::null_mut();
        assert_eq!(stabrad_solve_delta(a, s, 0.5, ptr::null(), &mut r), StabradStatus::Ok);
        assert!((stabrad_result_value(r) - 8.5228382298260e-1).abs() < 1e-6);
        assert_eq!(stabrad_result_status(r), StabradOuterStatus::Converged);
        assert!(!stabrad_result_is_eps_mode(r));
        let k = stabrad_result_iterations(r);
        assert!((2..=8).contains(&k));
        let (mut v, mut re, mut steps) = (0.0, 0.0, 0usize);
        assert_eq!(stabrad_result_row(r, 0, &mut v, &mut re, &mut steps), StabradStatus::Ok);
        assert_eq!(v, 0.0);
        assert!(re < 0.0 && steps > 0);
        assert_eq!(stabrad_result_row(r, k, &mut v, ptr::null_mut(), ptr::null_mut()), StabradStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));

        let mut dre = vec![0.0; 100];
        let mut dim = vec![0.0; 100];
        assert_eq!(stabrad_result_perturbation(r, StabradPerturbation::Delta, dre.as_mut_ptr(), dim.as_mut_ptr()), StabradStatus::Ok);
        let norm: f64 = dre.iter().chain(&dim).map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - stabrad_result_delta(r)).abs() < 1e-10);
        assert!(dim.iter().all(|&x| x == 0.0));
        // Delta lives on the band -1..=3.
        for i in 0..10i64 {
            for j in 0..10i64 {
                if j - i < -1 || j - i > 3 {
                    assert_eq!(dre[(i * 10 + j) as usize], 0.0);
                }
            }
        }

        let js = stabrad_result_to_json(r);
        let text = CStr::from_ptr(js).to_str().unwrap().to_owned();
        stabrad_string_free(js);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], "stabrad/1");
        assert_eq!(v["mode"], "solve-delta");

        stabrad_result_free(r);
        stabrad_structure_free(s);
        stabrad_matrix_free(a);
    }
}

#[test]
fn stability_radius_of_diagonal() {
    unsafe {
        let re = [-1.0, 0.0, 0.0, -2.0];
        let a = stabrad_matrix_new(2, re.as_ptr(), ptr::null());
        let mut r = ptr::null_mut();
        assert_eq!(stabrad_stability_radius(a, ptr::null(), &mut r), StabradStatus::Ok);
        assert!((stabrad_result_value(r) - 1.0).abs() < 1e-10);
        assert!(stabrad_result_is_eps_mode(r));
        let (mut lr, mut li) = (0.0, 0.0);
        assert_eq!(stabrad_result_eigenvalue(r, &mut lr, &mut li), StabradStatus::Ok);
        assert!(lr.abs() < 1e-8);
        stabrad_result_free(r);
        stabrad_matrix_free(a);
    }
}

#[test]
fn dual_solve_with_options() {
    unsafe {
        let a = stabrad_matrix_grcar(10, 1.0);
        let s = stabrad_structure_sparsity_real(a);
        let mut o = stabrad_options_default();
        assert_eq!(o.restarts, 1);
        assert_eq!(o.integrator, StabradIntegrator::Splitting);
        o.max_outer_iterations = 30;
        let mut r = ptr::null_mut();
        assert_eq!(stabrad_solve_eps(a, s, 8.5228382298260e-1, &o, &mut r), StabradStatus::Ok);
        assert!((stabrad_result_eps(r) - 0.5).abs() < 1e-8);
        stabrad_result_free(r);
        stabrad_structure_free(s);
        stabrad_matrix_free(a);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        assert!(stabrad_matrix_grcar(3, 1.0).is_null());
        assert!(last_error().contains("n >= 5"));

        let re = [1.0, 0.0, 0.0, -2.0];
        let a = stabrad_matrix_new(2, re.as_ptr(), ptr::null());
        let s = stabrad_structure_full_real(2);
        let mut r = ptr::null_mut();
        assert_eq!(stabrad_solve_delta(a, s, 0.1, ptr::null(), &mut r), StabradStatus::NotHurwitz);
        assert!(r.is_null());
        assert!(last_error().contains("not Hurwitz"));

        let stable = [-1.0, 0.0, 0.0, -2.0];
        let b = stabrad_matrix_new(2, stable.as_ptr(), ptr::null());
        let wrong = stabrad_structure_full_real(3);
        assert_eq!(stabrad_solve_delta(b, wrong, 0.1, ptr::null(), &mut r), StabradStatus::DimensionMismatch);
        stabrad_matrix_free(b);
        assert_eq!(stabrad_solve_delta(ptr::null(), s, 0.1, ptr::null(), &mut r), StabradStatus::NullPointer);
        assert_eq!(stabrad_solve_delta(a, s, 0.1, ptr::null(), ptr::null_mut()), StabradStatus::NullPointer);

        let path = CString::new("/nonexistent/file.mtx").unwrap();
        assert!(stabrad_matrix_read_mm(path.as_ptr()).is_null());
        assert!(stabrad_matrix_read_mm(ptr::null()).is_null());

        let nan = [f64::NAN];
        assert!(stabrad_matrix_new(1, nan.as_ptr(), ptr::null()).is_null());

        assert!(stabrad_result_to_json(ptr::null()).is_null());
        assert!(stabrad_result_value(ptr::null()).is_nan());
        stabrad_result_free(ptr::null_mut());
        stabrad_string_free(ptr::null_mut());
        stabrad_structure_free(wrong);
        stabrad_structure_free(s);
        stabrad_matrix_free(a);
    }
}

#[test]
fn matrix_market_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.mtx");
    std::fs::write(&p, "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 -1\n2 2 -2\n").unwrap();
    let c = CString::new(p.to_str().unwrap()).unwrap();
    unsafe {
        let a = stabrad_matrix_read_mm(c.as_ptr());
        assert!(!a.is_null());
        assert_eq!(stabrad_matrix_dim(a), 2);
        stabrad_matrix_free(a);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/stabrad.h")).unwrap();
    assert!(h.contains("#ifndef STABRAD_H"));
    for name in [
        "typedef struct StabradMatrix StabradMatrix;",
        "typedef struct StabradStructure StabradStructure;",
        "typedef struct StabradRadiusResult StabradRadiusResult;",
        "STABRAD_STATUS_OK = 0",
        "STABRAD_STATUS_NOT_HURWITZ",
        "stabrad_matrix_new(",
        "stabrad_matrix_grcar(",
        "stabrad_matrix_read_mm(",
        "stabrad_structure_sparsity_real(",
        "stabrad_structure_toeplitz_real(",
        "stabrad_options_default(",
        "stabrad_solve_delta(",
        "stabrad_solve_eps(",
        "stabrad_stability_radius(",
        "stabrad_result_perturbation(",
        "stabrad_result_to_json(",
        "stabrad_string_free(",
        "stabrad_last_error_message(",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(stabrad_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
