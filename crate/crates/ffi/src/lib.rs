//! C interface to `opcone`.
//!
//! Objects are opaque handles released with their `_free` function. Strings
//! returned through out-pointers are owned by the caller and released with
//! [`opcone_string_free`]. Every fallible call returns an [`OpconeStatus`];
//! the message of the last failure on the calling thread is available from
//! [`opcone_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use opcone::audit::{audit_theory, Postulate, Verdict};
use opcone::correlations::ProbabilityTable;
use opcone::{evaluate_with, parse_theory, Error, Theory};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpconeStatus {
    Ok = 0,
    InputError = 1,
    AuditFail = 2,
    UnphysicalSetup = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// A parsed and validated theory.
pub struct OpconeTheory(Theory);

/// A normalized probability table.
pub struct OpconeTable(ProbabilityTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: OpconeStatus, msg: impl Into<String>) -> OpconeStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> OpconeStatus {
    let status = match e {
        Error::UnphysicalSetup => OpconeStatus::UnphysicalSetup,
        _ => OpconeStatus::InputError,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> OpconeStatus) -> OpconeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(OpconeStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, OpconeStatus> {
    if p.is_null() {
        return Err(fail(OpconeStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(OpconeStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn opcone_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn opcone_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opcone_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a theory document. `origin` names the source in error messages.
///
/// # Safety
/// `text` and `origin` must be valid NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn opcone_theory_parse(
    text: *const c_char,
    origin: *const c_char,
    out: *mut *mut OpconeTheory,
) -> OpconeStatus {
    guarded(|| {
        if out.is_null() {
            return fail(OpconeStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let (text, origin) = match (read_str(text), read_str(origin)) {
            (Ok(t), Ok(o)) => (t, o),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match parse_theory(text, origin) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(OpconeTheory(t)));
                OpconeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `theory` must be null or a handle from [`opcone_theory_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opcone_theory_free(theory: *mut OpconeTheory) {
    if !theory.is_null() {
        drop(Box::from_raw(theory));
    }
}

/// Evaluates the theory's network.
///
/// # Safety
/// `theory` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn opcone_evaluate(theory: *const OpconeTheory, out: *mut *mut OpconeTable) -> OpconeStatus {
    guarded(|| {
        if theory.is_null() || out.is_null() {
            return fail(OpconeStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let t = &(*theory).0;
        let result = t.network().and_then(|n| evaluate_with(&n, &t.eval_options()));
        match result {
            Ok(r) => {
                *out = Box::into_raw(Box::new(OpconeTable(r.table)));
                OpconeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `table` must be null or a handle from [`opcone_evaluate`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opcone_table_free(table: *mut OpconeTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcone_table_len(table: *const OpconeTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.rows.len())
}

unsafe fn row_value(
    table: *const OpconeTable,
    index: usize,
    out: *mut f64,
    f: impl Fn(&opcone::correlations::ProbabilityRow) -> f64,
) -> OpconeStatus {
    if table.is_null() || out.is_null() {
        return fail(OpconeStatus::NullPointer, "null argument");
    }
    let t: &OpconeTable = &*table;
    match t.0.rows.get(index) {
        Some(row) => {
            *out = f(row);
            OpconeStatus::Ok
        }
        None => fail(OpconeStatus::OutOfRange, format!("row {index} out of range")),
    }
}

/// Normalized probability of row `index`.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn opcone_table_probability(table: *const OpconeTable, index: usize, out: *mut f64) -> OpconeStatus {
    row_value(table, index, out, |r| r.probability)
}

/// Raw probability weight of row `index`.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn opcone_table_weight(table: *const OpconeTable, index: usize, out: *mut f64) -> OpconeStatus {
    row_value(table, index, out, |r| r.weight)
}

/// Outcome labels of row `index`, comma separated.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable. The string must be
/// released with [`opcone_string_free`].
#[no_mangle]
pub unsafe extern "C" fn opcone_table_outcome(table: *const OpconeTable, index: usize, out: *mut *mut c_char) -> OpconeStatus {
    if table.is_null() || out.is_null() {
        return fail(OpconeStatus::NullPointer, "null argument");
    }
    *out = ptr::null_mut();
    let t: &OpconeTable = &*table;
    match t.0.rows.get(index) {
        Some(row) => {
            *out = into_c_string(row.outcome.join(","));
            OpconeStatus::Ok
        }
        None => fail(OpconeStatus::OutOfRange, format!("row {index} out of range")),
    }
}

/// The whole table as JSON.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn opcone_table_json(table: *const OpconeTable, out: *mut *mut c_char) -> OpconeStatus {
    guarded(|| {
        if table.is_null() || out.is_null() {
            return fail(OpconeStatus::NullPointer, "null argument");
        }
        match opcone::io::to_report(&(*table).0) {
            Ok(s) => {
                *out = into_c_string(s);
                OpconeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs the audits named in the comma-separated `postulates` and writes the
/// reports as JSON. Returns [`OpconeStatus::AuditFail`] (with the reports
/// still written) when any verdict is a failure.
///
/// # Safety
/// `theory` must be a live handle, `postulates` a valid string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn opcone_audit_json(
    theory: *const OpconeTheory,
    postulates: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> OpconeStatus {
    guarded(|| {
        if theory.is_null() || out.is_null() {
            return fail(OpconeStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let list = match read_str(postulates) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let mut selected = Vec::new();
        for p in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match Postulate::from_keyword(p) {
                Some(p) => selected.push(p),
                None => return fail(OpconeStatus::InputError, format!("unknown postulate `{p}`")),
            }
        }
        let reports = audit_theory(&(*theory).0, &selected, seed);
        match opcone::io::to_report(&reports) {
            Ok(s) => *out = into_c_string(s),
            Err(e) => return from_error(e),
        }
        if reports.iter().any(|r| r.verdict == Verdict::Fail) {
            fail(OpconeStatus::AuditFail, "an audit verdict is fail")
        } else {
            OpconeStatus::Ok
        }
    })
}

/// Success probability of the bundled indefinite-order game.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn opcone_ocb_success(out: *mut f64) -> OpconeStatus {
    guarded(|| {
        if out.is_null() {
            return fail(OpconeStatus::NullPointer, "null output pointer");
        }
        match opcone::ocb::ocb_demo() {
            Ok(r) => {
                *out = r.success;
                OpconeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
