use std::ffi::{CStr, CString};
use std::ptr;

use toric_mirror_ffi::*;

const P1: &str = "rank = 1\nray = 1\nray = -1\ncone = 1\ncone = 2\nprofile = qdeg=2,tord=1,yord=0\n";

fn last_error() -> String {
    unsafe { CStr::from_ptr(tm_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn parse_run_and_free() {
    let text = CString::new(P1).unwrap();
    let mut doc = ptr::null_mut();
    unsafe {
        assert_eq!(tm_document_parse(text.as_ptr(), &mut doc), TmStatus::Ok);
        let cmd = CString::new("inertia").unwrap();
        let mut out = ptr::null_mut();
        let mut code = -1;
        assert_eq!(tm_run(doc, cmd.as_ptr(), &mut out, &mut code), TmStatus::Ok);
        assert_eq!(code, 0);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(json["command"], "inertia");
        assert_eq!(json["results"]["box"].as_array().unwrap().len(), 1);
        tm_string_free(out);

        let mut ser = ptr::null_mut();
        assert_eq!(tm_document_serialize(doc, &mut ser), TmStatus::Ok);
        assert!(CStr::from_ptr(ser).to_str().unwrap().contains("tord=1"));
        tm_string_free(ser);
        tm_document_free(doc);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut doc = ptr::null_mut();
        assert_eq!(tm_document_parse(ptr::null(), &mut doc), TmStatus::NullArgument);
        let bad = CString::new("rank = 1\nray = 1\nray = -1\ncone = 1 2\n").unwrap();
        assert_eq!(tm_document_parse(bad.as_ptr(), &mut doc), TmStatus::Validation);
        assert!(doc.is_null());
        assert!(last_error().contains("linearly dependent"));

        let text = CString::new(P1).unwrap();
        assert_eq!(tm_document_parse(text.as_ptr(), &mut doc), TmStatus::Ok);
        let chi = CString::new("1,2").unwrap();
        assert_eq!(tm_document_set_chi(doc, chi.as_ptr()), TmStatus::Validation);
        let zero = CString::new("0").unwrap();
        assert_eq!(tm_document_set_chi(doc, zero.as_ptr()), TmStatus::Ok);
        let cmd = CString::new("mirror").unwrap();
        let mut out = ptr::null_mut();
        // a vanishing tangent weight cannot be localized at
        assert_eq!(tm_run(doc, cmd.as_ptr(), &mut out, ptr::null_mut()), TmStatus::IllPosed);
        assert!(out.is_null());
        let prof = CString::new("depth=3").unwrap();
        assert_eq!(tm_document_set_profile(doc, prof.as_ptr()), TmStatus::Validation);
        let unknown = CString::new("frobnicate").unwrap();
        assert_eq!(tm_run(doc, unknown.as_ptr(), &mut out, ptr::null_mut()), TmStatus::Validation);
        tm_document_free(doc);
        tm_document_free(ptr::null_mut());
        tm_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/toric_mirror.h")).unwrap();
    for name in ["tm_document_parse", "tm_document_free", "tm_document_serialize", "tm_document_set_profile", "tm_document_set_chi", "tm_run", "tm_string_free", "tm_last_error", "tm_version", "TM_STATUS_ILL_POSED", "typedef struct TmDocument TmDocument"] {
        assert!(h.contains(name), "{name} missing from header");
    }
    let v = unsafe { CStr::from_ptr(tm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
