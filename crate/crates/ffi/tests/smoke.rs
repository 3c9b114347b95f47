//! Drives the C ABI from Rust: happy paths, error codes and determinism.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use wardsim_ffi::{
    wardsim_fls_free, wardsim_fls_infer, wardsim_fls_parse, wardsim_last_error, wardsim_run_json,
    wardsim_string_free, wardsim_version, WardsimStatus,
};

fn last_error() -> String {
    unsafe { CStr::from_ptr(wardsim_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_a_static_string() {
    let version = unsafe { CStr::from_ptr(wardsim_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn parse_infer_and_free_a_system() {
    let text = CString::new(wardsim::config::DOCTOR_FLS_TEXT).unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { wardsim_fls_parse(text.as_ptr(), &mut handle) };
    assert!(matches!(status, WardsimStatus::Ok), "{}", last_error());
    assert!(!handle.is_null());

    let severity = CString::new("severity").unwrap();
    let mental = CString::new("mentalState").unwrap();
    let names: [*const c_char; 2] = [severity.as_ptr(), mental.as_ptr()];
    let values = [10.0f64, 0.0];
    let mut crisp = 0.0f64;
    let status =
        unsafe { wardsim_fls_infer(handle, names.as_ptr(), values.as_ptr(), 2, &mut crisp) };
    assert!(matches!(status, WardsimStatus::Ok), "{}", last_error());
    assert!(crisp > 40.0, "high severity, low mental state lands long: {crisp}");

    unsafe { wardsim_fls_free(handle) };
}

#[test]
fn null_and_garbage_arguments_return_typed_errors() {
    let mut handle = ptr::null_mut();
    let status = unsafe { wardsim_fls_parse(ptr::null(), &mut handle) };
    assert!(matches!(status, WardsimStatus::NullArgument));

    let garbage = CString::new("var nonsense\n").unwrap();
    let status = unsafe { wardsim_fls_parse(garbage.as_ptr(), &mut handle) };
    assert!(matches!(status, WardsimStatus::ParseError));
    assert!(last_error().contains("line 1"), "{}", last_error());

    let mut crisp = 0.0;
    let status =
        unsafe { wardsim_fls_infer(ptr::null(), ptr::null(), ptr::null(), 0, &mut crisp) };
    assert!(matches!(status, WardsimStatus::NullArgument));
}

#[test]
fn missing_inference_input_is_reported() {
    let text = CString::new(wardsim::config::DOCTOR_FLS_TEXT).unwrap();
    let mut handle = ptr::null_mut();
    assert!(matches!(
        unsafe { wardsim_fls_parse(text.as_ptr(), &mut handle) },
        WardsimStatus::Ok
    ));
    let severity = CString::new("severity").unwrap();
    let names = [severity.as_ptr()];
    let values = [3.0f64];
    let mut crisp = 0.0;
    let status =
        unsafe { wardsim_fls_infer(handle, names.as_ptr(), values.as_ptr(), 1, &mut crisp) };
    assert!(matches!(status, WardsimStatus::InvalidConfig));
    assert!(last_error().contains("mentalState"), "{}", last_error());
    unsafe { wardsim_fls_free(handle) };
}

#[test]
fn run_json_is_deterministic_per_seed() {
    let config = CString::new(
        r#"{"patients": 5, "beds": 4, "visitors": 2, "duration_days": 1}"#,
    )
    .unwrap();
    let run = |seed: u64| {
        let mut out = ptr::null_mut();
        let status = unsafe { wardsim_run_json(config.as_ptr(), seed, &mut out) };
        assert!(matches!(status, WardsimStatus::Ok), "{}", last_error());
        let text = unsafe { CStr::from_ptr(out) }.to_string_lossy().into_owned();
        unsafe { wardsim_string_free(out) };
        text
    };
    let a = run(9);
    let b = run(9);
    let c = run(10);
    assert_eq!(a, b);
    assert_ne!(a, c);

    let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(parsed["finalMeanMentalState"].is_number());
    assert_eq!(parsed["seed"], 9);
}

#[test]
fn invalid_config_json_is_a_typed_error() {
    let config = CString::new(r#"{"beds": 0}"#).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { wardsim_run_json(config.as_ptr(), 1, &mut out) };
    assert!(matches!(status, WardsimStatus::InvalidConfig));
    assert!(last_error().contains("beds"), "{}", last_error());
}
