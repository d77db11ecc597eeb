//! C interface. Types are opaque heap handles; every call returns a
//! [`TyisoStatus`] and writes results through out-pointers.
//!
//! Strings returned by the library must be released with
//! [`tyiso_string_free`], handles with [`tyiso_free`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tyiso::iso::{isomorphic_with, IsoVerdict};
use tyiso::rewrite::{normalize_with, RewriteConfig, Strategy};
use tyiso::syntax::parse_type;
use tyiso::type_core::TypeExpr;

/// Opaque type expression.
pub struct TyisoType {
    inner: TypeExpr,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TyisoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// Step budget exhausted or a spine too wide to normalise.
    Rewrite = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TyisoVerdict {
    Isomorphic = 0,
    NotIsomorphic = 1,
    Unknown = 2,
}

fn guard(f: impl FnOnce() -> TyisoStatus) -> TyisoStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(TyisoStatus::Internal)
}

fn boxed(t: TypeExpr) -> *mut TyisoType {
    Box::into_raw(Box::new(TyisoType { inner: t }))
}

/// Parses `src` into a new handle stored in `*out`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tyiso_parse(src: *const c_char, out: *mut *mut TyisoType) -> TyisoStatus {
    guard(|| {
        if src.is_null() || out.is_null() {
            return TyisoStatus::NullArgument;
        }
        let Ok(s) = CStr::from_ptr(src).to_str() else { return TyisoStatus::InvalidUtf8 };
        match parse_type(s) {
            Ok(t) => {
                *out = boxed(t);
                TyisoStatus::Ok
            }
            Err(_) => TyisoStatus::Parse,
        }
    })
}

/// # Safety
/// `t` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tyiso_free(t: *mut TyisoType) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Writes the printed form of `t` to `*out` as a new string.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tyiso_print(t: *const TyisoType, out: *mut *mut c_char) -> TyisoStatus {
    guard(|| {
        if t.is_null() || out.is_null() {
            return TyisoStatus::NullArgument;
        }
        match CString::new((*t).inner.to_string()) {
            Ok(s) => {
                *out = s.into_raw();
                TyisoStatus::Ok
            }
            Err(_) => TyisoStatus::Internal,
        }
    })
}

/// Normalises `t` with the leftmost-outermost strategy and default limits.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tyiso_normalize(t: *const TyisoType, out: *mut *mut TyisoType) -> TyisoStatus {
    guard(|| {
        if t.is_null() || out.is_null() {
            return TyisoStatus::NullArgument;
        }
        match normalize_with(&(*t).inner, Strategy::LeftmostOutermost, &RewriteConfig::default()) {
            Ok((nf, _)) => {
                *out = boxed(nf);
                TyisoStatus::Ok
            }
            Err(_) => TyisoStatus::Rewrite,
        }
    })
}

/// Decides isomorphism of `a` and `b`.
///
/// # Safety
/// `a` and `b` must be live handles and `verdict` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tyiso_isomorphic(a: *const TyisoType, b: *const TyisoType, verdict: *mut TyisoVerdict) -> TyisoStatus {
    guard(|| {
        if a.is_null() || b.is_null() || verdict.is_null() {
            return TyisoStatus::NullArgument;
        }
        match isomorphic_with(&(*a).inner, &(*b).inner, Strategy::LeftmostOutermost, &RewriteConfig::default()) {
            Ok(v) => {
                *verdict = match v {
                    IsoVerdict::Isomorphic(_) => TyisoVerdict::Isomorphic,
                    IsoVerdict::NotIsomorphic(_) => TyisoVerdict::NotIsomorphic,
                    IsoVerdict::Unknown(_) => TyisoVerdict::Unknown,
                };
                TyisoStatus::Ok
            }
            Err(tyiso::iso::IsoError::Rewrite(_)) => TyisoStatus::Rewrite,
            Err(_) => TyisoStatus::Internal,
        }
    })
}

/// # Safety
/// `s` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tyiso_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static description of a status code. Never null; do not free.
#[no_mangle]
pub extern "C" fn tyiso_status_message(status: TyisoStatus) -> *const c_char {
    let msg: &'static str = match status {
        TyisoStatus::Ok => "ok\0",
        TyisoStatus::NullArgument => "null argument\0",
        TyisoStatus::InvalidUtf8 => "input is not valid UTF-8\0",
        TyisoStatus::Parse => "parse error\0",
        TyisoStatus::Rewrite => "rewriting limit exceeded\0",
        TyisoStatus::Internal => "internal error\0",
    };
    msg.as_ptr().cast()
}

