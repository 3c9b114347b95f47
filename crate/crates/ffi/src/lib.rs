//! C ABI for the ward simulation: opaque handles, status codes, and a
//! thread-local last-error message. The generated header lives in
//! `include/wardsim.h`.
//!
//! Conventions: functions never panic across the boundary; every fallible
//! call returns a [`WardsimStatus`] and stores a message retrievable with
//! `wardsim_last_error`. Strings returned through `char **` are owned by
//! the caller and must be released with `wardsim_string_free`; handles with
//! their matching `_free` function.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};

use wardsim::config::ExperimentConfig;
use wardsim::fuzzy::{load_fls_definition, FuzzySystem};
use wardsim::sim::run_simulation;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum WardsimStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidConfig = 4,
    IoError = 5,
    RuntimeError = 6,
}

/// Opaque handle over a loaded fuzzy system.
pub struct WardsimFls {
    inner: FuzzySystem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: WardsimStatus, message: &str) -> WardsimStatus {
    set_error(message);
    status
}

unsafe fn utf8_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, WardsimStatus> {
    if ptr.is_null() {
        return Err(fail(WardsimStatus::NullArgument, &format!("{name} is null")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| fail(WardsimStatus::InvalidUtf8, &format!("{name} is not valid UTF-8")))
}

/// Crate version as a static string.
#[no_mangle]
pub extern "C" fn wardsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn wardsim_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a fuzzy system from definition text. On success stores a handle
/// in `out`; release it with `wardsim_fls_free`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wardsim_fls_parse(
    text: *const c_char,
    out: *mut *mut WardsimFls,
) -> WardsimStatus {
    if out.is_null() {
        return fail(WardsimStatus::NullArgument, "out is null");
    }
    let text = match unsafe { utf8_arg(text, "text") } {
        Ok(text) => text,
        Err(status) => return status,
    };
    match load_fls_definition(text) {
        Ok(system) => {
            unsafe { *out = Box::into_raw(Box::new(WardsimFls { inner: system })) };
            WardsimStatus::Ok
        }
        Err(e) => fail(WardsimStatus::ParseError, &e.to_string()),
    }
}

/// Reads and parses a fuzzy definition file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wardsim_fls_load(
    path: *const c_char,
    out: *mut *mut WardsimFls,
) -> WardsimStatus {
    if out.is_null() {
        return fail(WardsimStatus::NullArgument, "out is null");
    }
    let path = match unsafe { utf8_arg(path, "path") } {
        Ok(path) => path,
        Err(status) => return status,
    };
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => return fail(WardsimStatus::IoError, &format!("cannot read '{path}': {e}")),
    };
    match load_fls_definition(&text) {
        Ok(system) => {
            unsafe { *out = Box::into_raw(Box::new(WardsimFls { inner: system })) };
            WardsimStatus::Ok
        }
        Err(e) => fail(WardsimStatus::ParseError, &format!("{path}: {e}")),
    }
}

/// Runs one inference. `names`/`values` are parallel arrays of length `n`
/// naming every input variable; the crisp result lands in `out_crisp`.
///
/// # Safety
/// `fls` must come from `wardsim_fls_parse`/`wardsim_fls_load` and not yet
/// be freed; `names` and `values` must point to `n` valid entries;
/// `out_crisp` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wardsim_fls_infer(
    fls: *const WardsimFls,
    names: *const *const c_char,
    values: *const f64,
    n: usize,
    out_crisp: *mut f64,
) -> WardsimStatus {
    if fls.is_null() || out_crisp.is_null() || (n > 0 && (names.is_null() || values.is_null())) {
        return fail(WardsimStatus::NullArgument, "fls/names/values/out_crisp must not be null");
    }
    let mut inputs = BTreeMap::new();
    for i in 0..n {
        let name = match unsafe { utf8_arg(*names.add(i), "input name") } {
            Ok(name) => name,
            Err(status) => return status,
        };
        inputs.insert(name.to_string(), unsafe { *values.add(i) });
    }
    match unsafe { &(*fls) }.inner.infer(&inputs) {
        Ok(inference) => {
            unsafe { *out_crisp = inference.crisp };
            WardsimStatus::Ok
        }
        Err(e) => fail(WardsimStatus::InvalidConfig, &e.to_string()),
    }
}

/// Releases a fuzzy system handle. A null handle is a no-op.
///
/// # Safety
/// `fls` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wardsim_fls_free(fls: *mut WardsimFls) {
    if !fls.is_null() {
        drop(unsafe { Box::from_raw(fls) });
    }
}

/// Runs one simulation from a JSON configuration (same schema as the CLI)
/// and returns the final responses as a JSON string in `out_json` (caller
/// frees with `wardsim_string_free`). Fuzzy file paths in the configuration
/// are resolved relative to the process working directory; absent paths use
/// the embedded defaults.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out_json` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn wardsim_run_json(
    config_json: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> WardsimStatus {
    if out_json.is_null() {
        return fail(WardsimStatus::NullArgument, "out_json is null");
    }
    let text = match unsafe { utf8_arg(config_json, "config_json") } {
        Ok(text) => text,
        Err(status) => return status,
    };
    let config = match ExperimentConfig::from_json(text) {
        Ok(config) => config,
        Err(e) => return fail(WardsimStatus::InvalidConfig, &e.to_string()),
    };
    let fls = match config.fls.load(None) {
        Ok(fls) => fls,
        Err(e) => return fail(WardsimStatus::IoError, &e.to_string()),
    };
    let result = match run_simulation(&config, &fls, seed) {
        Ok(result) => result,
        Err(e) => return fail(WardsimStatus::RuntimeError, &e.to_string()),
    };
    let summary = serde_json::json!({
        "seed": seed,
        "configHash": config.config_hash(),
        "finalMeanMentalState": result.final_mean_mental_state,
        "finalMeanTrustRobots": result.final_mean_trust_robots,
        "finalMeanOpinionDoctors": result.final_mean_opinion_doctors,
        "finalMeanOpinionRobots": result.final_mean_opinion_robots,
        "finalEdges": {
            "green": result.final_edges.green,
            "yellow": result.final_edges.yellow,
            "red": result.final_edges.red,
        },
        "redEdgeFraction": result.red_edge_fraction,
        "queue": {
            "enqueued": result.queue_stats.enqueued,
            "dispatched": result.queue_stats.dispatched,
            "cancelledByVisit": result.queue_stats.cancelled_by_visit,
            "remainingAtEnd": result.queue_stats.remaining_at_end,
        },
    });
    let rendered = summary.to_string();
    match CString::new(rendered) {
        Ok(cstring) => {
            unsafe { *out_json = cstring.into_raw() };
            WardsimStatus::Ok
        }
        Err(_) => fail(WardsimStatus::RuntimeError, "result contained a NUL byte"),
    }
}

/// Releases a string returned by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wardsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
