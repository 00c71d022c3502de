use std::ffi::{c_char, CStr, CString};
use std::ptr;

use sndkit_ffi::*;

const SCENARIO: &str = include_str!("../../../scenarios/radio-100m-pt.toml");

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    snd_string_free(s);
    out
}

unsafe fn scenario(text: &str) -> *mut SndScenario {
    let c = CString::new(text).unwrap();
    let mut sc = ptr::null_mut();
    assert_eq!(snd_scenario_parse(c.as_ptr(), &mut sc), SndStatus::Ok);
    sc
}

#[test]
fn attack_then_check_reports_attack() {
    unsafe {
        let sc = scenario(SCENARIO);
        let mut relay = ptr::null_mut();
        let mut attack_toml = ptr::null_mut();
        let mut summary = ptr::null_mut();
        assert_eq!(snd_attack(sc, ptr::null(), &mut relay, &mut attack_toml, &mut summary), SndStatus::Ok);
        assert!(take(summary).contains("\"status\": \"attack\""));
        let attack_sc = scenario(&take(attack_toml));
        let mut result = SndCheckResult::Feasible;
        assert_eq!(snd_check(attack_sc, relay, &mut result, ptr::null_mut()), SndStatus::Ok);
        assert_eq!(result, SndCheckResult::Attack);
        assert_eq!(snd_trace_len(relay), 7);
        snd_trace_free(relay);
        snd_scenario_free(attack_sc);
        snd_scenario_free(sc);
    }
}

#[test]
fn witness_round_trips_and_checks() {
    unsafe {
        let sc = scenario(SCENARIO);
        let d = CString::new("100/3").unwrap();
        let mut trace = ptr::null_mut();
        let mut wsc = ptr::null_mut();
        assert_eq!(snd_witness(sc, d.as_ptr(), &mut trace, &mut wsc), SndStatus::Ok);
        let wsc = scenario(&take(wsc));
        let mut text = ptr::null_mut();
        assert_eq!(snd_trace_to_string(trace, &mut text), SndStatus::Ok);
        let text = CString::new(take(text)).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(snd_trace_parse(text.as_ptr(), &mut again), SndStatus::Ok);
        let mut result = SndCheckResult::Attack;
        assert_eq!(snd_check(wsc, again, &mut result, ptr::null_mut()), SndStatus::Ok);
        assert_eq!(result, SndCheckResult::Feasible);
        snd_trace_free(trace);
        snd_trace_free(again);
        snd_scenario_free(wsc);
        snd_scenario_free(sc);
    }
}

#[test]
fn out_of_range_witness() {
    unsafe {
        let sc = scenario(SCENARIO);
        let d = CString::new("200").unwrap();
        let mut trace = ptr::null_mut();
        assert_eq!(snd_witness(sc, d.as_ptr(), &mut trace, ptr::null_mut()), SndStatus::OutOfRange);
        assert!(trace.is_null());
        assert!(take(snd_last_error_message()).contains("outside"));
        snd_scenario_free(sc);
    }
}

#[test]
fn parse_errors_carry_line() {
    unsafe {
        let bad = CString::new(SCENARIO.replace("v = \"3/10\"", "v = \"3/0\"")).unwrap();
        let mut sc = ptr::null_mut();
        assert_eq!(snd_scenario_parse(bad.as_ptr(), &mut sc), SndStatus::Parse);
        assert!(sc.is_null());
        let msg = take(snd_last_error_message());
        assert!(msg.starts_with("line "), "{msg}");
    }
}

#[test]
fn infeasible_attack_still_summarized() {
    unsafe {
        let sc = scenario(&SCENARIO.replace("delta_relay = 40", "delta_relay = \"1000/3\""));
        let mut relay = ptr::null_mut();
        let mut summary = ptr::null_mut();
        assert_eq!(snd_attack(sc, ptr::null(), &mut relay, ptr::null_mut(), &mut summary), SndStatus::NoAttack);
        assert!(relay.is_null());
        assert!(take(summary).contains("infeasible"));
        snd_scenario_free(sc);
    }
}

#[test]
fn null_arguments_rejected() {
    unsafe {
        let mut sc = ptr::null_mut();
        assert_eq!(snd_scenario_parse(ptr::null(), &mut sc), SndStatus::NullPointer);
        assert_eq!(snd_check(ptr::null(), ptr::null(), ptr::null_mut(), ptr::null_mut()), SndStatus::NullPointer);
        assert_eq!(snd_trace_len(ptr::null()), 0);
        snd_string_free(ptr::null_mut());
        snd_trace_free(ptr::null_mut());
    }
}

#[test]
fn boundaries_as_json() {
    unsafe {
        let sc = scenario(SCENARIO);
        let mut out = ptr::null_mut();
        assert_eq!(snd_compute_boundaries(sc, &mut out), SndStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(json["pt_threshold"], "1000/3");
        assert_eq!(json["single_relay_max_dist"], "88");
        snd_scenario_free(sc);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(snd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
