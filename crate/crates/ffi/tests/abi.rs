use std::ffi::{CStr, CString};
use std::ptr;

use molopt_ffi::*;

fn reference() -> *mut MoloptParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { molopt_params_reference(&mut p) }, MoloptStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(molopt_last_error()) }.to_string_lossy().into_owned()
}

const REFERENCE_JSON: &str = r#"{
  "nu_b": 30.0, "nu_c": 30.0, "kappa_a": 30.0, "kappa_c": 0.5, "gamma_B": 0.16,
  "g_a": 0.08, "g_c": 0.1, "n_molecules": 1e7, "eps_p": 500.0, "eps_ir": 0.001,
  "detuning_mode": {"type": "fixed_delta", "delta_thz": -30.0}
}"#;

#[test]
fn json_handle_matches_reference() {
    let json = CString::new(REFERENCE_JSON).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { molopt_params_from_json(json.as_ptr(), &mut a) }, MoloptStatus::Ok);
    let b = reference();
    let (mut ta, mut tb) = (0.0, 0.0);
    unsafe {
        assert_eq!(molopt_tac(a, -1.0, 30.0, &mut ta), MoloptStatus::Ok);
        assert_eq!(molopt_tac(b, -1.0, 30.0, &mut tb), MoloptStatus::Ok);
        molopt_params_free(a);
        molopt_params_free(b);
    }
    assert_eq!(ta, tb);
}

#[test]
fn resonant_efficiency_and_optimum() {
    let p = reference();
    let (mut t, mut g) = (0.0, 0.0);
    unsafe {
        assert_eq!(molopt_optimal_coupling(p, &mut g), MoloptStatus::Ok);
        assert_eq!(molopt_tac(p, g, 30.0, &mut t), MoloptStatus::Ok);
        molopt_params_free(p);
    }
    assert!((g - 3.475).abs() < 1e-3, "optimal coupling {g}");
    assert!((t - 12.0).abs() < 1.5, "tac {t}");
}

#[test]
fn steady_state_of_reference() {
    let p = reference();
    let mut s = MoloptSteadyState::default();
    unsafe {
        assert_eq!(molopt_steady_state(p, &mut s), MoloptStatus::Ok);
        molopt_params_free(p);
    }
    assert_eq!(s.delta_eff, -30.0);
    assert!(s.converged);
    assert!((s.ga_re.hypot(s.ga_im) - 2.98).abs() < 0.01);
    assert!(s.max_residual <= 1e-10);
}

#[test]
fn stability_and_bandwidth() {
    let p = reference();
    let mut st = MoloptStability::default();
    let mut w = 0.0;
    unsafe {
        assert_eq!(molopt_stability(p, 3.0, &mut st), MoloptStatus::Ok);
        assert!(st.stable && st.spectral_abscissa < 0.0 && st.routh == 0);
        assert_eq!(molopt_stability(p, 5.0, &mut st), MoloptStatus::Ok);
        assert!(!st.stable && st.spectral_abscissa > 0.0 && st.routh == 1);
        assert_eq!(molopt_bandwidth(p, 3.4, &mut w), MoloptStatus::Ok);
        assert!((w - 0.0436).abs() < 0.002, "bandwidth {w}");
        assert_eq!(molopt_bandwidth(p, 0.0, &mut w), MoloptStatus::NoPeak);
        molopt_params_free(p);
    }
}

#[test]
fn errors_are_reported() {
    let mut p = ptr::null_mut();
    let bad = CString::new(r#"{"nu_b": 30.0}"#).unwrap();
    assert_eq!(unsafe { molopt_params_from_json(bad.as_ptr(), &mut p) }, MoloptStatus::ConfigError);
    assert!(p.is_null());
    assert!(last_error().contains("missing field"), "{}", last_error());

    let invalid = CString::new(REFERENCE_JSON.replace("\"kappa_a\": 30.0", "\"kappa_a\": -1.0")).unwrap();
    assert_eq!(unsafe { molopt_params_from_json(invalid.as_ptr(), &mut p) }, MoloptStatus::InvalidParams);

    assert_eq!(unsafe { molopt_params_from_json(ptr::null(), &mut p) }, MoloptStatus::NullPointer);
    let mut t = 0.0;
    assert_eq!(unsafe { molopt_tac(ptr::null(), 1.0, 30.0, &mut t) }, MoloptStatus::NullPointer);

    let h = reference();
    assert_eq!(unsafe { molopt_tac(h, f64::NAN, 30.0, &mut t) }, MoloptStatus::InvalidParams);
    assert_eq!(unsafe { molopt_tac(h, 1.0, 30.0, &mut t) }, MoloptStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { molopt_params_free(h) };
    unsafe { molopt_params_free(ptr::null_mut()) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(molopt_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
