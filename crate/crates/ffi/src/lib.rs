//! C ABI over the solver: configs and finished runs behind opaque handles,
//! integer status codes, and a thread-local last error message.
//!
//! Strings returned to the caller are owned by the library until passed to
//! [`dge_string_free`]; [`dge_last_error_message`] and [`dge_version`] return
//! borrowed pointers that must not be freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dgelasto::cli::{cmd_run, RunConfig, RunOutcome};
use dgelasto::estimator::eoc;
use dgelasto::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidArgument = 4,
    Solver = 5,
    Io = 6,
    /// The requested value does not exist for this run (no exact solution).
    NotAvailable = 7,
    Panic = 8,
}

/// A validated run configuration.
pub struct DgeConfig(RunConfig);

/// A finished run with its summary.
pub struct DgeRun(RunOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> DgeStatus {
    match e {
        Error::Config(_) => DgeStatus::Config,
        Error::InvalidArgument(_) | Error::InvalidMesh(_) | Error::OutOfDomain { .. } => DgeStatus::InvalidArgument,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => DgeStatus::Io,
        _ => DgeStatus::Solver,
    }
}

fn fail(status: DgeStatus, msg: impl Into<String>) -> DgeStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> DgeStatus {
    let s = status_of(&e);
    fail(s, format!("{}: {e}", e.kind()))
}

/// Runs `f`, turning panics into [`DgeStatus::Panic`].
fn guard(f: impl FnOnce() -> DgeStatus) -> DgeStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(DgeStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, DgeStatus> {
    if s.is_null() {
        return Err(fail(DgeStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(DgeStatus::InvalidUtf8, "string is not UTF-8"))
}

/// Parses and validates a JSON run configuration.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dge_config_from_json(json: *const c_char, out: *mut *mut DgeConfig) -> DgeStatus {
    guard(|| {
        if out.is_null() {
            return fail(DgeStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cfg: RunConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(DgeStatus::Config, format!("config: {e}")),
        };
        if let Err(e) = cfg.validate() {
            return from_error(e);
        }
        *out = Box::into_raw(Box::new(DgeConfig(cfg)));
        DgeStatus::Ok
    })
}

/// Replaces the output directory of `config`.
///
/// # Safety
/// `config` must come from [`dge_config_from_json`]; `dir` must be nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn dge_config_set_output_dir(config: *mut DgeConfig, dir: *const c_char) -> DgeStatus {
    guard(|| {
        let Some(cfg) = config.as_mut() else {
            return fail(DgeStatus::NullPointer, "null config");
        };
        match read_str(dir) {
            Ok(d) => {
                cfg.0.output_dir = d.into();
                DgeStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// The configuration as JSON; free the result with [`dge_string_free`].
///
/// # Safety
/// `config` must come from [`dge_config_from_json`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dge_config_to_json(config: *const DgeConfig, out: *mut *mut c_char) -> DgeStatus {
    guard(|| {
        let (Some(cfg), false) = (config.as_ref(), out.is_null()) else {
            return fail(DgeStatus::NullPointer, "null argument");
        };
        let s = serde_json::to_string(&cfg.0).expect("config serializes");
        *out = CString::new(s).expect("JSON has no nul").into_raw();
        DgeStatus::Ok
    })
}

/// # Safety
/// `config` must come from [`dge_config_from_json`] or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dge_config_free(config: *mut DgeConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Solves `config` and writes its artifacts to the configured output directory.
///
/// # Safety
/// `config` must come from [`dge_config_from_json`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dge_run(config: *const DgeConfig, out: *mut *mut DgeRun) -> DgeStatus {
    guard(|| {
        let (Some(cfg), false) = (config.as_ref(), out.is_null()) else {
            return fail(DgeStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        match cmd_run(&cfg.0) {
            Ok(o) => {
                *out = Box::into_raw(Box::new(DgeRun(o)));
                DgeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// `max_t 𝕳_R` over every time level.
///
/// # Safety
/// `run` must come from [`dge_run`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dge_run_max_indicator(run: *const DgeRun, out: *mut f64) -> DgeStatus {
    guard(|| {
        let (Some(r), false) = (run.as_ref(), out.is_null()) else {
            return fail(DgeStatus::NullPointer, "null argument");
        };
        *out = r.0.summary.max_indicator;
        DgeStatus::Ok
    })
}

/// `max_t e_R`; [`DgeStatus::NotAvailable`] without an exact solution.
///
/// # Safety
/// `run` must come from [`dge_run`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dge_run_max_error(run: *const DgeRun, out: *mut f64) -> DgeStatus {
    guard(|| {
        let (Some(r), false) = (run.as_ref(), out.is_null()) else {
            return fail(DgeStatus::NullPointer, "null argument");
        };
        match r.0.summary.max_error_reduced {
            Some(e) => {
                *out = e;
                DgeStatus::Ok
            }
            None => fail(DgeStatus::NotAvailable, "no exact solution for this test case"),
        }
    })
}

/// The run summary as JSON; free the result with [`dge_string_free`].
///
/// # Safety
/// `run` must come from [`dge_run`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dge_run_summary_json(run: *const DgeRun, out: *mut *mut c_char) -> DgeStatus {
    guard(|| {
        let (Some(r), false) = (run.as_ref(), out.is_null()) else {
            return fail(DgeStatus::NullPointer, "null argument");
        };
        match serde_json::to_string(&r.0.summary) {
            Ok(s) => {
                *out = CString::new(s).expect("JSON has no nul").into_raw();
                DgeStatus::Ok
            }
            Err(e) => fail(DgeStatus::Io, e.to_string()),
        }
    })
}

/// # Safety
/// `run` must come from [`dge_run`] or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dge_run_free(run: *mut DgeRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Writes the `len - 1` experimental orders of convergence of `values` over
/// mesh widths `widths` into `out`.
///
/// # Safety
/// `values` and `widths` must hold `len` doubles, `out` room for `len - 1`.
#[no_mangle]
pub unsafe extern "C" fn dge_eoc(values: *const f64, widths: *const f64, len: usize, out: *mut f64) -> DgeStatus {
    guard(|| {
        if values.is_null() || widths.is_null() || out.is_null() {
            return fail(DgeStatus::NullPointer, "null argument");
        }
        if len < 2 {
            return fail(DgeStatus::InvalidArgument, "need at least two values");
        }
        let v = std::slice::from_raw_parts(values, len);
        let h = std::slice::from_raw_parts(widths, len);
        match eoc(v, h) {
            Ok(r) => {
                std::slice::from_raw_parts_mut(out, len - 1).copy_from_slice(&r);
                DgeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Message of the last failed call on this thread, or null. Borrowed: valid
/// until the next call on this thread.
#[no_mangle]
pub extern "C" fn dge_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dge_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn dge_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
