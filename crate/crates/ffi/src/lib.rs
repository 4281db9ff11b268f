//! C ABI over the fan document parser and the report runner.
//!
//! Every call returns a `TmStatus`. Strings handed out by the library must be
//! released with `tm_string_free`; documents with `tm_document_free`. After a
//! non-OK status, `tm_last_error` describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use toric_mirror::cli::{self, ChiMode, CliError, InputDocument};

/// Status codes; 2, 3 and 4 coincide with the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TmStatus {
    Ok = 0,
    NullArgument = 1,
    Validation = 2,
    IllPosed = 3,
    Internal = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque parsed fan document.
pub struct TmDocument {
    doc: InputDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: TmStatus, msg: &str) -> TmStatus {
    set_error(msg);
    status
}

fn from_cli(e: &CliError) -> TmStatus {
    let s = match e {
        CliError::Validation(_) => TmStatus::Validation,
        CliError::IllPosed(_) => TmStatus::IllPosed,
        CliError::Internal(_) => TmStatus::Internal,
    };
    fail(s, &e.to_string())
}

fn guard(f: impl FnOnce() -> TmStatus) -> TmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_else(|| "panic".into());
            fail(TmStatus::Panic, &msg)
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TmStatus> {
    if p.is_null() {
        return Err(fail(TmStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(TmStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn give_string(s: String, out: *mut *mut c_char) -> TmStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            TmStatus::Ok
        }
        Err(_) => fail(TmStatus::Internal, "output contains a NUL byte"),
    }
}

/// Parses a fan document. On success `*out` owns a new document.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tm_document_parse(text: *const c_char, out: *mut *mut TmDocument) -> TmStatus {
    guard(|| {
        if out.is_null() {
            return fail(TmStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::parse_input(text) {
            Ok(doc) => {
                *out = Box::into_raw(Box::new(TmDocument { doc }));
                TmStatus::Ok
            }
            Err(e) => fail(TmStatus::Validation, &e.to_string()),
        }
    })
}

/// Releases a document; null is ignored.
///
/// # Safety
/// `doc` must come from `tm_document_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_document_free(doc: *mut TmDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Canonical text of the document.
///
/// # Safety
/// `doc` must be a live document and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tm_document_serialize(doc: *const TmDocument, out: *mut *mut c_char) -> TmStatus {
    guard(|| {
        if doc.is_null() || out.is_null() {
            return fail(TmStatus::NullArgument, "null argument");
        }
        give_string((*doc).doc.serialize(), out)
    })
}

/// Overrides the truncation profile with `qdeg=K,tord=K,yord=K` (any subset).
///
/// # Safety
/// `doc` must be a live document and `spec` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tm_document_set_profile(doc: *mut TmDocument, spec: *const c_char) -> TmStatus {
    guard(|| {
        if doc.is_null() {
            return fail(TmStatus::NullArgument, "null document");
        }
        let spec = match read_str(spec) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let d = &mut (*doc).doc;
        match d.profile.parse_over(spec) {
            Ok(p) => {
                d.profile = p;
                TmStatus::Ok
            }
            Err(e) => fail(TmStatus::Validation, &e),
        }
    })
}

/// Sets χ to `symbolic` or to comma-separated rationals.
///
/// # Safety
/// `doc` must be a live document and `spec` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tm_document_set_chi(doc: *mut TmDocument, spec: *const c_char) -> TmStatus {
    guard(|| {
        if doc.is_null() {
            return fail(TmStatus::NullArgument, "null document");
        }
        let spec = match read_str(spec) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let chi = match ChiMode::parse(spec) {
            Ok(c) => c,
            Err(e) => return fail(TmStatus::Validation, &e),
        };
        let mut next = (*doc).doc.clone();
        next.chi = chi;
        // length checks live in the parser
        match cli::parse_input(&next.serialize()) {
            Ok(d) => {
                (*doc).doc = d;
                TmStatus::Ok
            }
            Err(e) => fail(TmStatus::Validation, &e.to_string()),
        }
    })
}

/// Runs a command and returns the JSON report in `*json_out`. `*exit_out`, when
/// not null, receives 0 if every check passed and 4 otherwise.
///
/// # Safety
/// `doc` must be a live document, `command` a NUL-terminated string and
/// `json_out` a valid pointer; `exit_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn tm_run(doc: *const TmDocument, command: *const c_char, json_out: *mut *mut c_char, exit_out: *mut i32) -> TmStatus {
    guard(|| {
        if doc.is_null() || json_out.is_null() {
            return fail(TmStatus::NullArgument, "null argument");
        }
        *json_out = ptr::null_mut();
        let command = match read_str(command) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::run(command, &(*doc).doc) {
            Ok(r) => {
                if !exit_out.is_null() {
                    *exit_out = r.exit_code();
                }
                give_string(r.to_json(), json_out)
            }
            Err(e) => from_cli(&e),
        }
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn tm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn tm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
