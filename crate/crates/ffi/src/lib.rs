//! C interface to `linrec`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns one of the
//! `LINREC_*` status codes; on failure `linrec_last_error` describes the
//! most recent error on the calling thread.

use linrec::bounds::{ldpc_bound, thm1_bound, thm3_bound, worst_case_noise_bound};
use linrec::compressors::{sample_ldpc, write_alist, LdpcEnsembleSpec};
use linrec::gf::FieldSpec;
use linrec::harness::{experiment_csv, run_experiment, ExperimentConfig, ExperimentResult};
use linrec::prob::{binary_entropy, Pmf};
use linrec::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

pub const LINREC_OK: i32 = 0;
pub const LINREC_ERR_INTERNAL: i32 = 1;
pub const LINREC_ERR_CONFIG: i32 = 2;
pub const LINREC_ERR_RESOURCE: i32 = 3;
pub const LINREC_ERR_NULL: i32 = 4;
pub const LINREC_ERR_INVALID: i32 = 5;

/// An experiment configuration.
pub struct LinrecConfig {
    inner: ExperimentConfig,
}

/// The result of one experiment.
pub struct LinrecResult {
    inner: ExperimentResult,
}

/// Plain-data view of a [`LinrecResult`]. `bound_ldpc` is NaN when the
/// noise is not binary.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LinrecSummary {
    pub trials: u64,
    pub errors: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub event_missed: u64,
    pub event_false_accept: u64,
    pub event_tie: u64,
    pub pattern_count: u64,
    pub rc_realized: f64,
    pub rm: f64,
    pub rs: f64,
    pub bound_thm1: f64,
    pub bound_ldpc: f64,
    pub bound_thm3: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn code_for(e: &Error) -> i32 {
    match e {
        Error::Resource(_) => LINREC_ERR_RESOURCE,
        Error::Config { .. } | Error::Parse(_) => LINREC_ERR_CONFIG,
        Error::Io(_) => LINREC_ERR_INTERNAL,
        _ => LINREC_ERR_INVALID,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            LINREC_OK
        }
        Ok(Err((code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic");
            LINREC_ERR_INTERNAL
        }
    }
}

fn lib_err(e: Error) -> (i32, String) {
    (code_for(&e), e.to_string())
}

fn null_err(what: &str) -> (i32, String) {
    (LINREC_ERR_NULL, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (i32, String)> {
    if p.is_null() {
        return Err(null_err(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LINREC_ERR_INVALID, format!("{what} is not valid UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `linrec_*` call on the thread.
#[no_mangle]
pub extern "C" fn linrec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn linrec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A configuration with default values.
#[no_mangle]
pub extern "C" fn linrec_config_new() -> *mut LinrecConfig {
    Box::into_raw(Box::new(LinrecConfig { inner: ExperimentConfig::default() }))
}

/// # Safety
/// `cfg` must come from `linrec_config_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn linrec_config_free(cfg: *mut LinrecConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets one `section.key` to `value`.
///
/// # Safety
/// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn linrec_config_set(cfg: *mut LinrecConfig, key: *const c_char, value: *const c_char) -> i32 {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null_err("cfg"))?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        cfg.inner.set(key, value).map_err(lib_err)
    })
}

/// Applies the lines of a config file.
///
/// # Safety
/// `cfg` must be a live handle; `text` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn linrec_config_parse(cfg: *mut LinrecConfig, text: *const c_char) -> i32 {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null_err("cfg"))?;
        cfg.inner.apply_text(str_arg(text, "text")?).map_err(lib_err)
    })
}

/// The resolved configuration as text; release with `linrec_string_free`.
///
/// # Safety
/// `cfg` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn linrec_config_to_string(cfg: *const LinrecConfig) -> *mut c_char {
    match cfg.as_ref() {
        Some(cfg) => to_c_string(cfg.inner.to_text()),
        None => {
            set_last_error("cfg is null");
            ptr::null_mut()
        }
    }
}

/// Runs the experiment; on success `*out` receives a new result handle.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn linrec_run(cfg: *const LinrecConfig, out: *mut *mut LinrecResult) -> i32 {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null_err("cfg"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let res = run_experiment(&cfg.inner).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LinrecResult { inner: res }));
        Ok(())
    })
}

/// # Safety
/// `res` must come from `linrec_run` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn linrec_result_free(res: *mut LinrecResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// # Safety
/// `res` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn linrec_result_summary(res: *const LinrecResult, out: *mut LinrecSummary) -> i32 {
    guard(|| {
        let r = &res.as_ref().ok_or_else(|| null_err("res"))?.inner;
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = LinrecSummary {
            trials: r.trials,
            errors: r.errors,
            p_hat: r.p_hat,
            ci_lo: r.ci.0,
            ci_hi: r.ci.1,
            event_missed: r.events.missed_typicality,
            event_false_accept: r.events.false_accept,
            event_tie: r.events.tie,
            pattern_count: r.mc,
            rc_realized: r.rc_realized,
            rm: r.rm,
            rs: r.rs,
            bound_thm1: r.bounds.thm1,
            bound_ldpc: r.bounds.ldpc.unwrap_or(f64::NAN),
            bound_thm3: r.bounds.thm3,
        };
        Ok(())
    })
}

/// The result as CSV (comment line, header, one row); release with
/// `linrec_string_free`.
///
/// # Safety
/// `res` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn linrec_result_csv(res: *const LinrecResult) -> *mut c_char {
    match res.as_ref() {
        Some(r) => to_c_string(experiment_csv(&r.inner)),
        None => {
            set_last_error("res is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn linrec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn linrec_binary_entropy(q: f64) -> f64 {
    binary_entropy(q)
}

unsafe fn pmf_arg(spec: FieldSpec, p: *const f64, what: &str) -> Result<Pmf, (i32, String)> {
    if p.is_null() {
        return Err(null_err(what));
    }
    let probs = std::slice::from_raw_parts(p, spec.r()).to_vec();
    Pmf::new(spec, probs).map_err(lib_err)
}

/// Truncation-recognizer bound for pattern distribution `qx` and noise `qz`,
/// each an array of `r` probabilities.
///
/// # Safety
/// `qx` and `qz` must point to `r` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn linrec_thm1_bound(
    rm: f64,
    rs: f64,
    r: u32,
    qx: *const f64,
    qz: *const f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        let spec = FieldSpec::new(r).map_err(lib_err)?;
        let (qx, qz) = (pmf_arg(spec, qx, "qx")?, pmf_arg(spec, qz, "qz")?);
        *out = thm1_bound(rm, rs, &qx, &qz).map_err(lib_err)?.value;
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn linrec_ldpc_bound(rm: f64, rs: f64, q: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = ldpc_bound(rm, rs, q).map_err(lib_err)?.value;
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn linrec_thm3_bound(rm: f64, rs: f64, rz: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = thm3_bound(rm, rs, rz).map_err(lib_err)?.value;
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn linrec_worst_case_noise_bound(r: u32, q: f64, rate: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = worst_case_noise_bound(r, q, rate).map_err(lib_err)?.value;
        Ok(())
    })
}

/// Samples a `(dv, dc)`-regular LDPC matrix over GF(r) and returns it in
/// alist format through `*out`; release with `linrec_string_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn linrec_ldpc_alist(n: usize, dv: usize, dc: usize, r: u32, seed: u64, out: *mut *mut c_char) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let spec = FieldSpec::new(r).map_err(lib_err)?;
        let h = sample_ldpc(&LdpcEnsembleSpec { n, dv, dc, spec, seed }).map_err(lib_err)?;
        *out = to_c_string(write_alist(&h));
        Ok(())
    })
}
