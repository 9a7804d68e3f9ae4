//! C ABI for the stored-light simulator.
//!
//! Conventions: opaque handles behind pointers, integer status codes, and a
//! thread-local last-error message. Every function returning `SlStatus`
//! reports failure details through [`sl_last_error_message`]. Handles are
//! freed exactly once with the matching `_free` function; passing null where
//! a handle is required yields `SL_NULL_POINTER` rather than a crash.
//!
//! The C header is generated by cbindgen at build time into
//! `include/stored_light.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64 as C64;
use stored_light::config::{preset, RunConfig};
use stored_light::gates::{gate_matrix, synthesize, Unitary2};
use stored_light::protocol::{reconstruct_gate, run_protocol, ProtocolResult, ProtocolSpec};
use stored_light::Error;

/// Status codes returned by fallible functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    SlOk = 0,
    SlNullPointer = 1,
    SlInvalidUtf8 = 2,
    SlParseError = 3,
    SlValidationError = 4,
    SlSimulationError = 5,
    SlIoError = 6,
    SlPanic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> SlStatus {
    match err {
        Error::Config(_) => SlStatus::SlParseError,
        Error::Io(_) => SlStatus::SlIoError,
        e if e.exit_code() == 3 => SlStatus::SlValidationError,
        _ => SlStatus::SlSimulationError,
    }
}

fn guard<F: FnOnce() -> SlStatus>(f: F) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SlStatus::SlPanic
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque run configuration.
pub struct SlConfig {
    inner: RunConfig,
}

/// Opaque protocol outcome.
pub struct SlResult {
    inner: ProtocolResult,
    spec: ProtocolSpec,
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, SlStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(SlStatus::SlNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        SlStatus::SlInvalidUtf8
    })
}

/// Parse a TOML run configuration.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_config_from_toml(
    text: *const c_char,
    out: *mut *mut SlConfig,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return SlStatus::SlNullPointer;
        }
        let text = match utf8_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match RunConfig::from_toml(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(SlConfig { inner: cfg }));
                SlStatus::SlOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Build one of the named built-in presets.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_config_preset(
    name: *const c_char,
    out: *mut *mut SlConfig,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return SlStatus::SlNullPointer;
        }
        let name = match utf8_arg(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match preset(name) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(SlConfig { inner: cfg }));
                SlStatus::SlOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Serialize a configuration back to TOML; the returned string is owned by
/// the caller and released with [`sl_string_free`].
///
/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn sl_config_to_toml(config: *const SlConfig) -> *mut c_char {
    if config.is_null() {
        return ptr::null_mut();
    }
    let text = (*config).inner.to_toml();
    CString::new(text).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Release a configuration handle.
///
/// # Safety
/// `config` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_config_free(config: *mut SlConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Execute the three-stage protocol described by the configuration.
///
/// # Safety
/// `config` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_run_protocol(
    config: *const SlConfig,
    out: *mut *mut SlResult,
) -> SlStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            set_error("null handle");
            return SlStatus::SlNullPointer;
        }
        let spec = match (*config).inner.to_protocol_spec() {
            Ok(s) => s,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match run_protocol(&spec) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(SlResult { inner: result, spec }));
                SlStatus::SlOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a result handle.
///
/// # Safety
/// `result` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_result_free(result: *mut SlResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Fidelity of the retrieved qubit against the configured target.
///
/// # Safety
/// `result` must be a live handle; returns a negative value on null.
#[no_mangle]
pub unsafe extern "C" fn sl_result_fidelity(result: *const SlResult) -> f64 {
    if result.is_null() {
        return -1.0;
    }
    (*result).inner.fidelity_to_target
}

/// Retrieved qubit amplitudes in the circular basis.
///
/// # Safety
/// All pointers must be valid; `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_result_output_qubit(
    result: *const SlResult,
    c_plus_re: *mut f64,
    c_plus_im: *mut f64,
    c_minus_re: *mut f64,
    c_minus_im: *mut f64,
) -> SlStatus {
    if result.is_null()
        || c_plus_re.is_null()
        || c_plus_im.is_null()
        || c_minus_re.is_null()
        || c_minus_im.is_null()
    {
        set_error("null handle");
        return SlStatus::SlNullPointer;
    }
    let q = (*result).inner.output_qubit;
    *c_plus_re = q.c_plus().re;
    *c_plus_im = q.c_plus().im;
    *c_minus_re = q.c_minus().re;
    *c_minus_im = q.c_minus().im;
    SlStatus::SlOk
}

/// Input qubit amplitudes the run started from, in the circular basis.
///
/// # Safety
/// All pointers must be valid; `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_result_input_qubit(
    result: *const SlResult,
    c_plus_re: *mut f64,
    c_plus_im: *mut f64,
    c_minus_re: *mut f64,
    c_minus_im: *mut f64,
) -> SlStatus {
    if result.is_null()
        || c_plus_re.is_null()
        || c_plus_im.is_null()
        || c_minus_re.is_null()
        || c_minus_im.is_null()
    {
        set_error("null handle");
        return SlStatus::SlNullPointer;
    }
    let q = (*result).spec.input_qubit;
    *c_plus_re = q.c_plus().re;
    *c_plus_im = q.c_plus().im;
    *c_minus_re = q.c_minus().re;
    *c_minus_im = q.c_minus().im;
    SlStatus::SlOk
}

/// Scalar diagnostics of a run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SlDiagnostics {
    pub max_s_bbprime: f64,
    pub polariton_norm_drift: f64,
    pub adiabaticity: f64,
    pub com_shift: f64,
    pub com_shift_predicted: f64,
    pub energy_ratio: f64,
    pub warning_count: usize,
}

/// Copy out the run diagnostics.
///
/// # Safety
/// `result` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_result_diagnostics(
    result: *const SlResult,
    out: *mut SlDiagnostics,
) -> SlStatus {
    if result.is_null() || out.is_null() {
        set_error("null handle");
        return SlStatus::SlNullPointer;
    }
    let d = &(*result).inner.diagnostics;
    *out = SlDiagnostics {
        max_s_bbprime: d.max_s_bbprime,
        polariton_norm_drift: d.polariton_norm_drift,
        adiabaticity: d.adiabaticity,
        com_shift: d.com_shift,
        com_shift_predicted: d.com_shift_predicted,
        energy_ratio: d.energy_ratio,
        warning_count: d.warnings.len(),
    };
    SlStatus::SlOk
}

/// Run the four-probe reconstruction for the configured protocol and return
/// the fitted gate, row-major (re, im) pairs, plus the fit residual.
///
/// # Safety
/// `config` must be a live handle; `entries` must point to 8 doubles and
/// `residual` to one.
#[no_mangle]
pub unsafe extern "C" fn sl_reconstruct_gate(
    config: *const SlConfig,
    entries: *mut f64,
    residual: *mut f64,
) -> SlStatus {
    guard(|| {
        if config.is_null() || entries.is_null() || residual.is_null() {
            set_error("null handle");
            return SlStatus::SlNullPointer;
        }
        let spec = match (*config).inner.to_protocol_spec() {
            Ok(s) => s,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match reconstruct_gate(&spec) {
            Ok(rec) => {
                let g = rec.gate;
                let out = std::slice::from_raw_parts_mut(entries, 8);
                out.copy_from_slice(&[
                    g.g11.re, g.g11.im, g.g12.re, g.g12.im, g.g21.re, g.g21.im, g.g22.re, g.g22.im,
                ]);
                *residual = rec.residual;
                SlStatus::SlOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Fill `entries` (8 doubles, row-major re/im pairs) with the two-parameter
/// gate matrix at (chi, beta).
///
/// # Safety
/// `entries` must point to 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_gate_matrix(chi: f64, beta: f64, entries: *mut f64) -> SlStatus {
    if entries.is_null() {
        set_error("null output pointer");
        return SlStatus::SlNullPointer;
    }
    let g = gate_matrix(chi, beta);
    let out = std::slice::from_raw_parts_mut(entries, 8);
    out.copy_from_slice(&[
        g.g11.re, g.g11.im, g.g12.re, g.g12.im, g.g21.re, g.g21.im, g.g22.re, g.g22.im,
    ]);
    SlStatus::SlOk
}

/// Factor a unitary (8 doubles, row-major re/im pairs) into Z-Y-Z pulse
/// parameters: phi1, beta, phi2 and the global phase.
///
/// # Safety
/// `entries` must point to 8 doubles; the out parameters must be valid.
#[no_mangle]
pub unsafe extern "C" fn sl_synthesize(
    entries: *const f64,
    phi1: *mut f64,
    beta: *mut f64,
    phi2: *mut f64,
    global_phase: *mut f64,
) -> SlStatus {
    guard(|| {
        if entries.is_null()
            || phi1.is_null()
            || beta.is_null()
            || phi2.is_null()
            || global_phase.is_null()
        {
            set_error("null pointer");
            return SlStatus::SlNullPointer;
        }
        let e = std::slice::from_raw_parts(entries, 8);
        let target = match Unitary2::new(
            C64::new(e[0], e[1]),
            C64::new(e[2], e[3]),
            C64::new(e[4], e[5]),
            C64::new(e[6], e[7]),
        ) {
            Ok(u) => u,
            Err(err) => {
                set_error(&err.to_string());
                return SlStatus::SlValidationError;
            }
        };
        match synthesize(&target) {
            Ok(d) => {
                *phi1 = d.phi1;
                *beta = d.beta;
                *phi2 = d.phi2;
                *global_phase = d.global_phase;
                SlStatus::SlOk
            }
            Err(err) => {
                set_error(&err.to_string());
                SlStatus::SlValidationError
            }
        }
    })
}
