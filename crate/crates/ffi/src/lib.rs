//! C ABI for sndkit.
//!
//! Scenarios and traces live behind opaque handles. Every function returns
//! an [`SndStatus`]; on failure a message is available from
//! [`snd_last_error_message`]. Strings returned through `out` parameters are
//! owned by the caller and released with [`snd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sndkit::analysis::compute_boundaries;
use sndkit::attack::{AttackError, Variant};
use sndkit::commands::{attack_from_scenario, check_trace, witness_from_scenario, AttackArgs};
use sndkit::event::Trace;
use sndkit::io::report::{CheckStatus, Format, Report};
use sndkit::io::scenario::Scenario;
use sndkit::io::tracefile::{parse_trace, write_trace};
use sndkit::io::{LoadError, LoadErrorKind};
use sndkit::params::InaccuracyParams;
use sndkit::scalar::Scalar;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SndStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Input is not well-formed.
    Parse = 3,
    /// Input is well-formed but semantically invalid.
    Validation = 4,
    /// No attack exists for the scenario; a summary is still produced.
    NoAttack = 5,
    /// Witness distance outside (0, R].
    OutOfRange = 6,
    Internal = 7,
}

/// Outcome of [`snd_check`], numbered like the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SndCheckResult {
    Feasible = 0,
    Infeasible = 2,
    Attack = 3,
}

/// Opaque parsed scenario.
pub struct SndScenario {
    inner: Scenario,
}

/// Opaque event trace.
pub struct SndTrace {
    inner: Trace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SndStatus, msg: impl Into<String>) -> SndStatus {
    set_error(msg);
    status
}

fn load_status(e: &LoadError) -> SndStatus {
    let status = match e.kind {
        LoadErrorKind::Parse => SndStatus::Parse,
        LoadErrorKind::Validation => SndStatus::Validation,
    };
    fail(status, e.to_string())
}

/// Run `f`, converting panics to `Internal`.
fn guard(f: impl FnOnce() -> SndStatus) -> SndStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SndStatus::Internal, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SndStatus> {
    if s.is_null() {
        return Err(fail(SndStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(SndStatus::InvalidUtf8, e.to_string()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) {
    if !out.is_null() {
        *out = CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw);
    }
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Parse a TOML scenario.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn snd_scenario_parse(toml: *const c_char, out: *mut *mut SndScenario) -> SndStatus {
    guard(|| {
        if out.is_null() {
            return fail(SndStatus::NullPointer, "null out pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Scenario::parse(text) {
            Ok(sc) => {
                write_handle(out, SndScenario { inner: sc });
                SndStatus::Ok
            }
            Err(e) => load_status(&e),
        }
    })
}

/// Render a scenario back to TOML.
///
/// # Safety
/// `scenario` must come from [`snd_scenario_parse`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn snd_scenario_to_toml(scenario: *const SndScenario, out: *mut *mut c_char) -> SndStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(SndStatus::NullPointer, "null argument");
        }
        write_string(out, (*scenario).inner.to_toml());
        SndStatus::Ok
    })
}

/// # Safety
/// `scenario` must come from [`snd_scenario_parse`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn snd_scenario_free(scenario: *mut SndScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Parse a trace in line-delimited JSON.
///
/// # Safety
/// `jsonl` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn snd_trace_parse(jsonl: *const c_char, out: *mut *mut SndTrace) -> SndStatus {
    guard(|| {
        if out.is_null() {
            return fail(SndStatus::NullPointer, "null out pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(jsonl) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_trace(text) {
            Ok(t) => {
                write_handle(out, SndTrace { inner: t });
                SndStatus::Ok
            }
            Err(e) => load_status(&e),
        }
    })
}

/// Render a trace as line-delimited JSON in canonical order.
///
/// # Safety
/// `trace` must be a live trace handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn snd_trace_to_string(trace: *const SndTrace, out: *mut *mut c_char) -> SndStatus {
    guard(|| {
        if trace.is_null() || out.is_null() {
            return fail(SndStatus::NullPointer, "null argument");
        }
        write_string(out, write_trace(&(*trace).inner));
        SndStatus::Ok
    })
}

/// Number of events, or 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn snd_trace_len(trace: *const SndTrace) -> usize {
    if trace.is_null() {
        0
    } else {
        (*trace).inner.len()
    }
}

/// # Safety
/// `trace` must be a handle returned by this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn snd_trace_free(trace: *mut SndTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Run every feasibility checker and ND1 detection. `report_json` may be
/// null.
///
/// # Safety
/// Handles must be live; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn snd_check(
    scenario: *const SndScenario,
    trace: *const SndTrace,
    result: *mut SndCheckResult,
    report_json: *mut *mut c_char,
) -> SndStatus {
    guard(|| {
        if scenario.is_null() || trace.is_null() || result.is_null() {
            return fail(SndStatus::NullPointer, "null argument");
        }
        let report = check_trace(&(*scenario).inner, &(*trace).inner);
        *result = match report.status {
            CheckStatus::Ok => SndCheckResult::Feasible,
            CheckStatus::Infeasible => SndCheckResult::Infeasible,
            CheckStatus::Attack => SndCheckResult::Attack,
        };
        write_string(report_json, report.render(Format::Structured));
        SndStatus::Ok
    })
}

/// Synthesize a relay attack. `variant` is "single-relay", "wormhole" or
/// null for the scenario's default. On success `relay_trace` receives the
/// attack trace; `NoAttack` still fills `summary_json`. Output pointers
/// other than `relay_trace` may be null.
///
/// # Safety
/// `scenario` must be live; string arguments NUL-terminated or null.
#[no_mangle]
pub unsafe extern "C" fn snd_attack(
    scenario: *const SndScenario,
    variant: *const c_char,
    relay_trace: *mut *mut SndTrace,
    attack_scenario_toml: *mut *mut c_char,
    summary_json: *mut *mut c_char,
) -> SndStatus {
    guard(|| {
        if scenario.is_null() || relay_trace.is_null() {
            return fail(SndStatus::NullPointer, "null argument");
        }
        *relay_trace = ptr::null_mut();
        let variant = if variant.is_null() {
            None
        } else {
            match read_str(variant).map(|v| v.parse::<Variant>()) {
                Ok(Ok(v)) => Some(v),
                Ok(Err(e)) => return fail(SndStatus::Validation, e),
                Err(s) => return s,
            }
        };
        let args = AttackArgs { variant, ..AttackArgs::default() };
        let (summary, files) = match attack_from_scenario(&(*scenario).inner, &args) {
            Ok(x) => x,
            Err(e) => return fail(SndStatus::Validation, e.to_string()),
        };
        write_string(summary_json, summary.render(Format::Structured));
        if !summary.succeeded() {
            return fail(SndStatus::NoAttack, summary.reason.unwrap_or_default());
        }
        let file = |name: &str| files.iter().find(|(n, _)| n == name).map(|(_, t)| t.as_str()).unwrap_or("");
        match parse_trace(file("relay.jsonl")) {
            Ok(t) => write_handle(relay_trace, SndTrace { inner: t }),
            Err(e) => return fail(SndStatus::Internal, e.to_string()),
        }
        write_string(attack_scenario_toml, file("attack-scenario.toml").to_owned());
        SndStatus::Ok
    })
}

/// Generate a run in which A discovers B at `distance` (a rational such
/// as "50" or "100/3"). `witness_scenario_toml` may be null.
///
/// # Safety
/// `scenario` must be live; `distance` NUL-terminated; `trace` valid.
#[no_mangle]
pub unsafe extern "C" fn snd_witness(
    scenario: *const SndScenario,
    distance: *const c_char,
    trace: *mut *mut SndTrace,
    witness_scenario_toml: *mut *mut c_char,
) -> SndStatus {
    guard(|| {
        if scenario.is_null() || trace.is_null() {
            return fail(SndStatus::NullPointer, "null argument");
        }
        *trace = ptr::null_mut();
        let d: Scalar = match read_str(distance).map(|s| s.parse()) {
            Ok(Ok(d)) => d,
            Ok(Err(e)) => return fail(SndStatus::Parse, format!("distance: {e}")),
            Err(s) => return s,
        };
        match witness_from_scenario(&(*scenario).inner, None, &d) {
            Ok((_, files)) => {
                let text = |i: usize| files[i].1.clone();
                match parse_trace(&text(1)) {
                    Ok(t) => write_handle(trace, SndTrace { inner: t }),
                    Err(e) => return fail(SndStatus::Internal, e.to_string()),
                }
                write_string(witness_scenario_toml, text(0));
                SndStatus::Ok
            }
            Err(e @ AttackError::OutOfRange { .. }) => fail(SndStatus::OutOfRange, e.to_string()),
            Err(e) => fail(SndStatus::Internal, e.to_string()),
        }
    })
}

/// Closed-form security boundaries for the scenario's parameters, as JSON.
///
/// # Safety
/// `scenario` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn snd_compute_boundaries(scenario: *const SndScenario, out: *mut *mut c_char) -> SndStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(SndStatus::NullPointer, "null argument");
        }
        let sc = &(*scenario).inner;
        let inacc = sc.inaccuracy().cloned().unwrap_or_else(InaccuracyParams::exact);
        let report = compute_boundaries(&sc.params, &inacc);
        match serde_json::to_string(&report) {
            Ok(s) => {
                write_string(out, s);
                SndStatus::Ok
            }
            Err(e) => fail(SndStatus::Internal, e.to_string()),
        }
    })
}

/// Copy of the message for the last failure on this thread, or null.
/// Release with [`snd_string_free`].
#[no_mangle]
pub extern "C" fn snd_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn snd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn snd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
