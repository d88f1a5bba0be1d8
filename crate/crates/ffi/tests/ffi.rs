use std::ffi::{CStr, CString};
use std::ptr;

use entcert_ffi::*;

fn bell() -> (Vec<f64>, Vec<f64>) {
    let mut re = vec![0.0; 16];
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        re[i * 4 + j] = 1.0;
    }
    (re, vec![0.0; 16])
}

#[test]
fn bell_is_distillable() {
    let (re, im) = bell();
    let mut state = ptr::null_mut();
    unsafe {
        assert_eq!(entcert_state_new(2, 2, re.as_ptr(), im.as_ptr(), &mut state), EntcertStatus::Ok);
        let (mut a, mut b, mut r) = (0, 0, 0);
        assert_eq!(entcert_state_shape(state, &mut a, &mut b, &mut r), EntcertStatus::Ok);
        assert_eq!((a, b, r), (2, 2, 1));
        let (mut ppt, mut min) = (true, 0.0);
        assert_eq!(entcert_is_ppt(state, &mut ppt, &mut min), EntcertStatus::Ok);
        assert!(!ppt);
        assert!((min + 1.0).abs() < 1e-12);
        let mut cert = ptr::null_mut();
        assert_eq!(entcert_analyze(state, 7, &mut cert), EntcertStatus::Ok);
        let mut v = EntcertVerdict::Undecided;
        assert_eq!(entcert_certificate_verdict(cert, &mut v), EntcertStatus::Ok);
        assert_eq!(v, EntcertVerdict::Distillable);
        assert_eq!(entcert_certificate_validate(cert), EntcertStatus::Ok);
        let mut js = ptr::null_mut();
        assert_eq!(entcert_certificate_json(cert, &mut js), EntcertStatus::Ok);
        let text = CStr::from_ptr(js).to_str().unwrap().to_owned();
        assert!(text.contains("\"verdict\":\"Distillable\""));
        entcert_string_free(js);
        entcert_certificate_free(cert);
        entcert_state_free(state);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut state = ptr::null_mut();
        let re = [-1.0];
        assert_eq!(entcert_state_new(1, 1, re.as_ptr(), ptr::null(), &mut state), EntcertStatus::NotPsd);
        assert!(state.is_null());
        let msg = CStr::from_ptr(entcert_last_error()).to_str().unwrap();
        assert!(!msg.is_empty());
        assert_eq!(
            entcert_state_new(1, 1, ptr::null(), ptr::null(), &mut state),
            EntcertStatus::NullPointer
        );
        let path = CString::new("/nonexistent/state.json").unwrap();
        assert_eq!(entcert_state_from_file(path.as_ptr(), &mut state), EntcertStatus::Io);
        let mut v = EntcertVerdict::Undecided;
        assert_eq!(entcert_certificate_verdict(ptr::null(), &mut v), EntcertStatus::NullPointer);
        entcert_state_free(ptr::null_mut());
        entcert_certificate_free(ptr::null_mut());
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(entcert_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/entcert.h")).unwrap();
    for name in [
        "entcert_last_error",
        "entcert_version",
        "entcert_state_new",
        "entcert_state_from_file",
        "entcert_state_free",
        "entcert_state_shape",
        "entcert_is_ppt",
        "entcert_analyze",
        "entcert_certificate_verdict",
        "entcert_certificate_validate",
        "entcert_certificate_json",
        "entcert_certificate_free",
        "entcert_string_free",
        "typedef struct EntcertState EntcertState",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
