//! C ABI over the freediv job runner.
//!
//! Jobs are parsed into an opaque [`FreedivJob`] handle and run into an opaque
//! [`FreedivResult`] handle. Every fallible call returns a [`FreedivStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`freediv_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use freediv::job::{self, Command, JobSpec, ResultRecord};
use freediv::Error;

/// Status codes. The nonzero library codes match the command line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreedivStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    ParseError = 2,
    PreconditionFailed = 3,
    NonStabilization = 4,
    InvariantViolated = 5,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

impl From<&Error> for FreedivStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => FreedivStatus::ParseError,
            Error::Precondition(_) => FreedivStatus::PreconditionFailed,
            Error::NonStabilization(_) => FreedivStatus::NonStabilization,
            Error::Invariant(_) => FreedivStatus::InvariantViolated,
        }
    }
}

/// A parsed job.
pub struct FreedivJob {
    spec: JobSpec,
}

/// The record produced by running a job. Owns its rendered strings.
pub struct FreedivResult {
    record: ResultRecord,
    json: CString,
    text: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> FreedivStatus) -> FreedivStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside freediv");
            FreedivStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, FreedivStatus> {
    if p.is_null() {
        set_error(format!("{} is null", what));
        return Err(FreedivStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{} is not valid UTF-8", what));
        FreedivStatus::InvalidUtf8
    })
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into the library from the same thread.
#[no_mangle]
pub extern "C" fn freediv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn freediv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses job text. `command` may be null, in which case the text must carry
/// a `command` line; otherwise it names the default command.
///
/// # Safety
/// `text` and a non-null `command` must be NUL-terminated strings; `out` must
/// be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn freediv_job_parse(
    text: *const c_char,
    command: *const c_char,
    out: *mut *mut FreedivJob,
) -> FreedivStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return FreedivStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let default = if command.is_null() {
            None
        } else {
            let name = match read_str(command, "command") {
                Ok(c) => c,
                Err(s) => return s,
            };
            match Command::from_name(name) {
                Some(c) => Some(c),
                None => {
                    set_error(format!("unknown command '{}'", name));
                    return FreedivStatus::ParseError;
                }
            }
        };
        match job::parse_job_with(text, default) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(FreedivJob { spec }));
                FreedivStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                (&e).into()
            }
        }
    })
}

/// Runs a job. On return `*out` holds a result even when the computation
/// itself failed; the returned status is then the failure code.
///
/// # Safety
/// `job` must come from [`freediv_job_parse`] and not yet be freed; `out` must
/// be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn freediv_job_run(job: *const FreedivJob, out: *mut *mut FreedivResult) -> FreedivStatus {
    guard(|| {
        if job.is_null() || out.is_null() {
            set_error("job or out is null");
            return FreedivStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let record = job::run(&(*job).spec, false);
        let status = match &record.outcome {
            Ok(_) => FreedivStatus::Ok,
            Err(e) => {
                set_error(e.to_string());
                e.into()
            }
        };
        let json = CString::new(record.to_json_string()).unwrap_or_default();
        let text = CString::new(record.to_text_string()).unwrap_or_default();
        *out = Box::into_raw(Box::new(FreedivResult { record, json, text }));
        status
    })
}

/// Canonical text of a parsed job. The caller frees it with
/// [`freediv_string_free`].
///
/// # Safety
/// `job` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn freediv_job_to_text(job: *const FreedivJob) -> *mut c_char {
    if job.is_null() {
        return ptr::null_mut();
    }
    CString::new(job::to_text(&(*job).spec)).map_or(ptr::null_mut(), CString::into_raw)
}

/// JSON rendering of a result, owned by the result handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn freediv_result_json(result: *const FreedivResult) -> *const c_char {
    if result.is_null() {
        return ptr::null();
    }
    (*result).json.as_ptr()
}

/// Indented text rendering of a result, owned by the result handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn freediv_result_text(result: *const FreedivResult) -> *const c_char {
    if result.is_null() {
        return ptr::null();
    }
    (*result).text.as_ptr()
}

/// Exit code the command line tool would report for this result, or -1 for null.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn freediv_result_exit_code(result: *const FreedivResult) -> i32 {
    if result.is_null() {
        return -1;
    }
    (*result).record.exit_code()
}

/// # Safety
/// `job` must come from [`freediv_job_parse`] or be null, and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn freediv_job_free(job: *mut FreedivJob) {
    if !job.is_null() {
        drop(Box::from_raw(job));
    }
}

/// # Safety
/// `result` must come from [`freediv_job_run`] or be null, and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn freediv_result_free(result: *mut FreedivResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn freediv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
