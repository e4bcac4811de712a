use std::ffi::{CStr, CString};
use std::ptr;

use dgelasto_ffi::*;

fn last_error() -> String {
    let p = dge_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn eoc_of_identity_sequence() {
    let h = [0.5, 0.25, 0.125];
    let mut out = [0.0; 2];
    let s = unsafe { dge_eoc(h.as_ptr(), h.as_ptr(), 3, out.as_mut_ptr()) };
    assert_eq!(s, DgeStatus::Ok);
    assert!(out.iter().all(|r| (r - 1.0).abs() < 1e-15));
    let bad = [1.0, 0.0, 1.0];
    let s = unsafe { dge_eoc(bad.as_ptr(), h.as_ptr(), 3, out.as_mut_ptr()) };
    assert_eq!(s, DgeStatus::InvalidArgument);
    assert!(last_error().contains("positive"));
}

#[test]
fn null_pointers_are_rejected() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { dge_config_from_json(ptr::null(), &mut cfg) }, DgeStatus::NullPointer);
    assert!(cfg.is_null());
    let mut out = 0.0;
    assert_eq!(unsafe { dge_run_max_indicator(ptr::null(), &mut out) }, DgeStatus::NullPointer);
    unsafe {
        dge_config_free(ptr::null_mut());
        dge_run_free(ptr::null_mut());
        dge_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_degree_is_a_config_error() {
    let json = CString::new(r#"{"p": 5}"#).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { dge_config_from_json(json.as_ptr(), &mut cfg) }, DgeStatus::Config);
    assert!(cfg.is_null());
    assert!(last_error().starts_with("config"));
    let junk = CString::new("{not json").unwrap();
    assert_eq!(unsafe { dge_config_from_json(junk.as_ptr(), &mut cfg) }, DgeStatus::Config);
}

#[test]
fn small_run_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let json = CString::new(r#"{"test_case": "test1", "n": 8, "p": 1, "t_final": 0.05}"#).unwrap();
    let out_dir = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(dge_config_from_json(json.as_ptr(), &mut cfg), DgeStatus::Ok);
        assert_eq!(dge_config_set_output_dir(cfg, out_dir.as_ptr()), DgeStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(dge_config_to_json(cfg, &mut text), DgeStatus::Ok);
        assert!(CStr::from_ptr(text).to_str().unwrap().contains("\"n\":8"));
        dge_string_free(text);

        let mut run = ptr::null_mut();
        assert_eq!(dge_run(cfg, &mut run), DgeStatus::Ok, "{}", last_error());
        let (mut ind, mut err) = (0.0, 0.0);
        assert_eq!(dge_run_max_indicator(run, &mut ind), DgeStatus::Ok);
        assert_eq!(dge_run_max_error(run, &mut err), DgeStatus::Ok);
        assert!(ind > err && err > 0.0);
        let mut summary = ptr::null_mut();
        assert_eq!(dge_run_summary_json(run, &mut summary), DgeStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(summary).to_str().unwrap()).unwrap();
        assert_eq!(v["n_elements"], 8);
        dge_string_free(summary);
        dge_run_free(run);
        dge_config_free(cfg);
    }
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn missing_error_is_reported_for_periodic_cases() {
    let dir = tempfile::tempdir().unwrap();
    let json = CString::new(r#"{"test_case": "test2", "n": 8, "p": 1, "t_final": 0.01}"#).unwrap();
    let out_dir = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(dge_config_from_json(json.as_ptr(), &mut cfg), DgeStatus::Ok);
        dge_config_set_output_dir(cfg, out_dir.as_ptr());
        let mut run = ptr::null_mut();
        assert_eq!(dge_run(cfg, &mut run), DgeStatus::Ok);
        let mut err = 0.0;
        assert_eq!(dge_run_max_error(run, &mut err), DgeStatus::NotAvailable);
        dge_run_free(run);
        dge_config_free(cfg);
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(dge_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dgelasto.h")).unwrap();
    for name in ["dge_config_from_json", "dge_run", "dge_eoc", "dge_last_error_message", "DGE_STATUS_NOT_AVAILABLE", "typedef struct DgeRun DgeRun"] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/dgelasto.h");
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() else {
        // no C compiler on this machine
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
