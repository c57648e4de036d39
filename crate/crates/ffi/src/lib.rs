//! C interface to `distred`.
//!
//! Objects are opaque handles owned by the caller and released with the
//! matching `dr_*_free`. Functions return a [`DrStatus`]; on failure the
//! message is available from [`dr_last_error`] on the same thread. Strings
//! returned by the library are released with [`dr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use distred::io::{parse_distribution_file, ResultDocument};
use distred::verifier::{exists_reduction, verify_reduction, VerifyOptions};
use distred::{Distribution, Error, Outcome, Verdict};

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Capacity = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DrOutcome {
    ValidReduction = 0,
    NotReduction = 1,
    Unknown = 2,
}

/// A distribution of a named alphabet.
pub struct DrDistribution {
    inner: Distribution,
}

/// A list of distributions over the alphabet of some source.
pub struct DrCandidate {
    members: Vec<Distribution>,
}

/// The verdict of a verification or existence check.
pub struct DrVerdict {
    inner: Verdict,
    command: &'static str,
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

fn status_of(e: &Error) -> DrStatus {
    match e {
        Error::Parse { .. } => DrStatus::Parse,
        Error::CapacityExceeded { .. } | Error::SizeCapExceeded { .. } => DrStatus::Capacity,
        _ => DrStatus::InvalidInput,
    }
}

/// Runs `f`, recording its error and turning panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (DrStatus, String)>) -> DrStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DrStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DrStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DrStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, (DrStatus, String)> {
    if p.is_null() {
        return Err((DrStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DrStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (DrStatus, String)> {
    p.as_ref().ok_or((DrStatus::NullPointer, "null handle".into()))
}

fn out_ptr<T>(out: *mut *mut T) -> Result<(), (DrStatus, String)> {
    if out.is_null() {
        Err((DrStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn dr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn dr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses distribution-file text holding exactly one distribution.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dr_distribution_parse(text: *const c_char, out: *mut *mut DrDistribution) -> DrStatus {
    guard(|| {
        out_ptr(out)?;
        let file = parse_distribution_file(c_str(text)?).map_err(lib_err)?;
        let d = file.single().map_err(lib_err)?.distribution.clone();
        *out = Box::into_raw(Box::new(DrDistribution { inner: d }));
        Ok(())
    })
}

/// Number of parts.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dr_distribution_size(d: *const DrDistribution) -> usize {
    d.as_ref().map_or(0, |d| d.inner.size())
}

/// Canonical `(ab|bc)` rendering; free with [`dr_string_free`].
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dr_distribution_render(d: *const DrDistribution) -> *mut c_char {
    d.as_ref().map_or(ptr::null_mut(), |d| into_c_string(d.inner.render()))
}

/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dr_distribution_free(d: *mut DrDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Parses distribution-file text listing candidate members. Its alphabet
/// must name the same symbols, in the same order, as `source`'s.
///
/// # Safety
/// Pointers must be valid; `out` receives a new handle on success.
#[no_mangle]
pub unsafe extern "C" fn dr_candidate_parse(
    source: *const DrDistribution,
    text: *const c_char,
    out: *mut *mut DrCandidate,
) -> DrStatus {
    guard(|| {
        out_ptr(out)?;
        let src = &handle(source)?.inner;
        let file = parse_distribution_file(c_str(text)?).map_err(lib_err)?;
        if file.alphabet.names() != src.alphabet().names() {
            return Err((DrStatus::InvalidInput, "candidate and source alphabets differ".into()));
        }
        let members = file
            .entries
            .iter()
            .map(|e| Distribution::new(src.alphabet().clone(), e.written.iter().copied()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DrCandidate { members }));
        Ok(())
    })
}

/// Number of members.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dr_candidate_len(c: *const DrCandidate) -> usize {
    c.as_ref().map_or(0, |c| c.members.len())
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dr_candidate_free(c: *mut DrCandidate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

fn options(parallel: bool) -> VerifyOptions {
    VerifyOptions {
        parallel,
        ..VerifyOptions::default()
    }
}

/// Decides whether `candidate` is a reduction of `source`.
///
/// # Safety
/// Pointers must be valid; `out` receives a new handle on success.
#[no_mangle]
pub unsafe extern "C" fn dr_verify(
    source: *const DrDistribution,
    candidate: *const DrCandidate,
    parallel: bool,
    out: *mut *mut DrVerdict,
) -> DrStatus {
    guard(|| {
        out_ptr(out)?;
        let src = &handle(source)?.inner;
        let c = handle(candidate)?;
        let v = verify_reduction(src, &c.members, &options(parallel)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DrVerdict { inner: v, command: "verify" }));
        Ok(())
    })
}

/// Decides whether `source` has any reduction.
///
/// # Safety
/// Pointers must be valid; `out` receives a new handle on success.
#[no_mangle]
pub unsafe extern "C" fn dr_exists(source: *const DrDistribution, parallel: bool, out: *mut *mut DrVerdict) -> DrStatus {
    guard(|| {
        out_ptr(out)?;
        let src = &handle(source)?.inner;
        let v = exists_reduction(src, &options(parallel)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DrVerdict { inner: v, command: "exists" }));
        Ok(())
    })
}

/// Outcome of a verdict; `Unknown` for a null handle.
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dr_verdict_outcome(v: *const DrVerdict) -> DrOutcome {
    match v.as_ref().map(|v| v.inner.outcome) {
        Some(Outcome::ValidReduction) => DrOutcome::ValidReduction,
        Some(Outcome::NotReduction) => DrOutcome::NotReduction,
        _ => DrOutcome::Unknown,
    }
}

/// Mechanism label such as `substitution`, or null when there is none.
/// The string is static.
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dr_verdict_mechanism(v: *const DrVerdict) -> *const c_char {
    let Some(m) = v.as_ref().and_then(|v| v.inner.mechanism) else {
        return ptr::null();
    };
    // Labels are static; keep NUL-terminated copies alive for the process.
    static LABELS: std::sync::OnceLock<std::sync::Mutex<Vec<(&'static str, CString)>>> = std::sync::OnceLock::new();
    let table = LABELS.get_or_init(Default::default);
    let mut t = table.lock().unwrap_or_else(|e| e.into_inner());
    let label = m.label();
    if let Some((_, c)) = t.iter().find(|(l, _)| *l == label) {
        return c.as_ptr();
    }
    let c = CString::new(label).expect("labels have no NUL");
    let p = c.as_ptr();
    t.push((label, c));
    p
}

/// The verdict as a JSON result document; free with [`dr_string_free`].
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dr_verdict_to_json(v: *const DrVerdict) -> *mut c_char {
    v.as_ref()
        .map_or(ptr::null_mut(), |v| into_c_string(ResultDocument::from_verdict(v.command, &v.inner).to_json()))
}

/// # Safety
/// `v` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dr_verdict_free(v: *mut DrVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
