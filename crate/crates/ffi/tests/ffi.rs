use std::ffi::{CStr, CString};
use std::ptr;
use tyiso_ffi::*;

fn parse(s: &str) -> *mut TyisoType {
    let src = CString::new(s).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tyiso_parse(src.as_ptr(), &mut out) }, TyisoStatus::Ok);
    out
}

fn print(t: *const TyisoType) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tyiso_print(t, &mut s) }, TyisoStatus::Ok);
    let r = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { tyiso_string_free(s) };
    r
}

#[test]
fn normalize_round_trip() {
    let t = parse("a -> (b & c) | d");
    let mut n = ptr::null_mut();
    assert_eq!(unsafe { tyiso_normalize(t, &mut n) }, TyisoStatus::Ok);
    assert_eq!(print(n), "(a -> b | d) & (a -> c | d)");
    unsafe {
        tyiso_free(n);
        tyiso_free(t);
    }
}

#[test]
fn verdicts() {
    let cases = [
        ("a -> b & c", "(a -> b) & (a -> c)", TyisoVerdict::Isomorphic),
        ("a & b", "a | b", TyisoVerdict::NotIsomorphic),
        ("(s | t -> r) & p", "(t | s -> r) & p", TyisoVerdict::Unknown),
    ];
    for (a, b, want) in cases {
        let (ta, tb) = (parse(a), parse(b));
        let mut v = TyisoVerdict::Unknown;
        assert_eq!(unsafe { tyiso_isomorphic(ta, tb, &mut v) }, TyisoStatus::Ok);
        assert_eq!(v, want, "{a} vs {b}");
        unsafe {
            tyiso_free(ta);
            tyiso_free(tb);
        }
    }
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    let bad = CString::new("a ->").unwrap();
    assert_eq!(unsafe { tyiso_parse(bad.as_ptr(), &mut out) }, TyisoStatus::Parse);
    assert!(out.is_null());
    assert_eq!(unsafe { tyiso_parse(ptr::null(), &mut out) }, TyisoStatus::NullArgument);
    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { tyiso_parse(bytes.as_ptr().cast(), &mut out) }, TyisoStatus::InvalidUtf8);
    let mut v = TyisoVerdict::Unknown;
    assert_eq!(unsafe { tyiso_isomorphic(ptr::null(), ptr::null(), &mut v) }, TyisoStatus::NullArgument);
    let msg = unsafe { CStr::from_ptr(tyiso_status_message(TyisoStatus::Parse)) };
    assert_eq!(msg.to_str().unwrap(), "parse error");
    unsafe {
        tyiso_free(ptr::null_mut());
        tyiso_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tyiso.h")).unwrap();
    for f in ["tyiso_parse", "tyiso_free", "tyiso_normalize", "tyiso_isomorphic", "tyiso_print", "tyiso_string_free", "TyisoType"] {
        assert!(h.contains(f), "{f} missing from header");
    }
}
