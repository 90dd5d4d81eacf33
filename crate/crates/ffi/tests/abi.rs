use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use freediv_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn text(p: *const std::ffi::c_char) -> String {
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap().to_owned()
}

#[test]
fn parse_run_and_render() {
    let src = c("ring x, y, z\nweights 1, 1, 1\ndivisor \"x*y*z\"\n");
    let cmd = c("is-free");
    unsafe {
        let mut job = ptr::null_mut();
        assert_eq!(
            freediv_job_parse(src.as_ptr(), cmd.as_ptr(), &mut job),
            FreedivStatus::Ok
        );
        assert!(freediv_last_error().is_null());

        let canon = freediv_job_to_text(job);
        assert!(text(canon).contains("command is-free"));
        freediv_string_free(canon);

        let mut res = ptr::null_mut();
        assert_eq!(freediv_job_run(job, &mut res), FreedivStatus::Ok);
        assert_eq!(freediv_result_exit_code(res), 0);
        let v: serde_json::Value = serde_json::from_str(&text(freediv_result_json(res))).unwrap();
        assert_eq!(v["command"], "is-free");
        assert!(v.get("result").is_some());
        assert!(text(freediv_result_text(res)).contains("command: is-free"));
        freediv_result_free(res);
        freediv_job_free(job);
    }
}

#[test]
fn parse_error_reports_position() {
    let src = c("ring x, y\ndivisor \"x*(y\"\n");
    let cmd = c("is-free");
    unsafe {
        let mut job = ptr::null_mut();
        assert_eq!(
            freediv_job_parse(src.as_ptr(), cmd.as_ptr(), &mut job),
            FreedivStatus::ParseError
        );
        assert!(job.is_null());
        assert!(text(freediv_last_error()).contains("line 2"));
    }
}

#[test]
fn unknown_command_and_null_arguments() {
    let src = c("ring x\ndivisor \"x\"\n");
    let bad = c("no-such-command");
    unsafe {
        let mut job = ptr::null_mut();
        assert_eq!(
            freediv_job_parse(src.as_ptr(), bad.as_ptr(), &mut job),
            FreedivStatus::ParseError
        );
        assert_eq!(
            freediv_job_parse(ptr::null(), ptr::null(), &mut job),
            FreedivStatus::NullArgument
        );
        assert_eq!(
            freediv_job_parse(src.as_ptr(), ptr::null(), ptr::null_mut()),
            FreedivStatus::NullArgument
        );
        let mut res = ptr::null_mut();
        assert_eq!(freediv_job_run(ptr::null(), &mut res), FreedivStatus::NullArgument);
        assert!(freediv_result_json(ptr::null()).is_null());
        assert_eq!(freediv_result_exit_code(ptr::null()), -1);
        freediv_job_free(ptr::null_mut());
        freediv_result_free(ptr::null_mut());
        freediv_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_rejected() {
    let raw = CString::new(vec![0xff, 0xfe, b'x']).unwrap();
    unsafe {
        let mut job = ptr::null_mut();
        assert_eq!(
            freediv_job_parse(raw.as_ptr(), ptr::null(), &mut job),
            FreedivStatus::InvalidUtf8
        );
    }
}

#[test]
fn precondition_failure_still_yields_a_result() {
    // omega-check needs a free divisor.
    let src = c("ring x, y, z\nweights 1, 1, 1\ndivisor \"x*y*z*(x+y+z)\"\n");
    let cmd = c("omega-check");
    unsafe {
        let mut job = ptr::null_mut();
        assert_eq!(
            freediv_job_parse(src.as_ptr(), cmd.as_ptr(), &mut job),
            FreedivStatus::Ok
        );
        let mut res = ptr::null_mut();
        let status = freediv_job_run(job, &mut res);
        assert_eq!(status, FreedivStatus::PreconditionFailed);
        assert_eq!(freediv_result_exit_code(res), 3);
        assert!(text(freediv_result_json(res)).contains("\"error\""));
        assert!(!freediv_last_error().is_null());
        freediv_result_free(res);
        freediv_job_free(job);
    }
}

#[test]
fn version_matches_package() {
    unsafe { assert_eq!(text(freediv_version()), env!("CARGO_PKG_VERSION")) };
}

#[test]
fn header_declares_every_export_and_compiles_as_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/freediv.h");
    let body = std::fs::read_to_string(&header).unwrap();
    for f in [
        "freediv_last_error",
        "freediv_version",
        "freediv_job_parse",
        "freediv_job_run",
        "freediv_job_to_text",
        "freediv_result_json",
        "freediv_result_text",
        "freediv_result_exit_code",
        "freediv_job_free",
        "freediv_result_free",
        "freediv_string_free",
        "FREEDIV_STATUS_PRECONDITION_FAILED = 3",
    ] {
        assert!(body.contains(f), "header lacks {}", f);
    }
    // Only checked where a C compiler is on the path.
    if let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    {
        assert!(status.success(), "header does not compile as C");
    }
}
