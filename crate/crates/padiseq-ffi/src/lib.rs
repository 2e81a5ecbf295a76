//! C ABI over the padiseq library.
//!
//! Conventions:
//! - Every fallible call returns a `PsqStatus`; `PSQ_STATUS_OK` is zero.
//! - On failure, `psq_last_error` returns a message for the current thread,
//!   valid until the thread's next padiseq call.
//! - Big integers cross the boundary as decimal strings. Returned strings
//!   are owned by the caller and released with `psq_string_free`.
//! - Handles (`PsqBase`, `PsqThreeSquares`) are opaque and released with
//!   their matching `_free` function. A NULL handle is rejected, never
//!   dereferenced.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use num_bigint::BigInt;
use padiseq::arith::{ExtendedNat, FactoredBase};
use padiseq::classify::{
    classify_digits, classify_last_nonzero, classify_valuation, FunctionTuple, Kind,
};
use padiseq::cli::parse_poly_tuple;
use padiseq::error::Error;
use padiseq::lucas::{
    lucas_term, sanna_valuation, three_squares_classify, three_squares_verify, LucasParams,
    ThreeSquaresReport,
};

/// Result of every fallible call. Matches the CLI exit codes where the
/// cause is the same kind of failure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum PsqStatus {
    /// The call succeeded.
    PSQ_STATUS_OK = 0,
    /// A required pointer argument was NULL.
    PSQ_STATUS_NULL_ARGUMENT = 1,
    /// The input is outside the function's domain.
    PSQ_STATUS_DOMAIN_ERROR = 2,
    /// A certified bound could not be met at working precision.
    PSQ_STATUS_PRECISION_ERROR = 3,
    /// A string argument did not parse.
    PSQ_STATUS_PARSE_ERROR = 4,
    /// An internal invariant failed; the library state is still sound.
    PSQ_STATUS_INTERNAL_ERROR = 5,
}

use PsqStatus::*;

/// Opaque handle to a factored base b >= 2.
pub struct PsqBase(FactoredBase);

/// Opaque handle to a three-squares classification report.
pub struct PsqThreeSquares(ThreeSquaresReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::default());
}

fn status_of(e: &Error) -> PsqStatus {
    match e {
        Error::Domain(_) => PSQ_STATUS_DOMAIN_ERROR,
        Error::Precision(_) => PSQ_STATUS_PRECISION_ERROR,
        Error::Parse(_) => PSQ_STATUS_PARSE_ERROR,
    }
}

fn fail(e: &Error) -> PsqStatus {
    set_error(&e.to_string());
    status_of(e)
}

fn fail_null(what: &str) -> PsqStatus {
    set_error(&format!("{} must not be NULL", what));
    PSQ_STATUS_NULL_ARGUMENT
}

/// Runs a body that may panic; a panic becomes PSQ_STATUS_INTERNAL_ERROR
/// instead of unwinding across the C boundary.
fn guarded(f: impl FnOnce() -> PsqStatus) -> PsqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(panic) => {
            let text = if let Some(s) = panic.downcast_ref::<&str>() {
                (*s).to_string()
            } else if let Some(s) = panic.downcast_ref::<String>() {
                s.clone()
            } else {
                "internal error".to_string()
            };
            set_error(&text);
            PSQ_STATUS_INTERNAL_ERROR
        }
    }
}

/// # Safety
/// `s` must be NULL or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, PsqStatus> {
    if s.is_null() {
        return Err(fail_null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(&format!("{} is not valid UTF-8", what));
        PSQ_STATUS_PARSE_ERROR
    })
}

fn read_bigint(text: &str, what: &str) -> Result<BigInt, PsqStatus> {
    BigInt::from_str(text.trim()).map_err(|_| {
        set_error(&format!("{} is not a decimal integer: {:?}", what, text));
        PSQ_STATUS_PARSE_ERROR
    })
}

fn give_string(out: *mut *mut c_char, text: String) -> PsqStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => {
            set_error("result contained an interior NUL byte");
            return PSQ_STATUS_INTERNAL_ERROR;
        }
    };
    unsafe { *out = c.into_raw() };
    PSQ_STATUS_OK
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn psq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the current thread's most recent failure; empty when the last
/// call succeeded. Valid until the thread's next padiseq call; do not free.
#[no_mangle]
pub extern "C" fn psq_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a factored base handle for b >= 2.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn psq_base_new(b: u64, out: *mut *mut PsqBase) -> PsqStatus {
    guarded(|| {
        clear_error();
        if out.is_null() {
            return fail_null("out");
        }
        match FactoredBase::new(b) {
            Ok(base) => {
                *out = Box::into_raw(Box::new(PsqBase(base)));
                PSQ_STATUS_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a base handle. NULL is ignored.
///
/// # Safety
/// `base` must be NULL or an unfreed handle from `psq_base_new`.
#[no_mangle]
pub unsafe extern "C" fn psq_base_free(base: *mut PsqBase) {
    if !base.is_null() {
        drop(Box::from_raw(base));
    }
}

/// The integer value b of a base handle; 0 for NULL.
///
/// # Safety
/// `base` must be NULL or a live handle from `psq_base_new`.
#[no_mangle]
pub unsafe extern "C" fn psq_base_value(base: *const PsqBase) -> u64 {
    if base.is_null() {
        0
    } else {
        (*base).0.b()
    }
}

/// nu_b of a decimal integer. On success, `*infinite` is 1 and `*nu` is 0
/// when the value is 0, else `*infinite` is 0 and `*nu` holds the valuation.
///
/// # Safety
/// `base` must be a live handle, `value` a NUL-terminated string, and `nu`
/// and `infinite` writable.
#[no_mangle]
pub unsafe extern "C" fn psq_valuation(
    base: *const PsqBase,
    value: *const c_char,
    nu: *mut u64,
    infinite: *mut i32,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if base.is_null() {
            return fail_null("base");
        }
        if nu.is_null() || infinite.is_null() {
            return fail_null("output");
        }
        let text = match read_str(value, "value") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let x = match read_bigint(text, "value") {
            Ok(x) => x,
            Err(s) => return s,
        };
        match (*base).0.nu_int(&x) {
            ExtendedNat::Finite(v) => {
                *nu = v;
                *infinite = 0;
            }
            ExtendedNat::Infinity => {
                *nu = 0;
                *infinite = 1;
            }
        }
        PSQ_STATUS_OK
    })
}

/// L_b of a decimal integer, as a new decimal string in `*out`.
///
/// # Safety
/// `base` must be a live handle, `value` a NUL-terminated string, and `out`
/// writable for one pointer.
#[no_mangle]
pub unsafe extern "C" fn psq_last_nonzero(
    base: *const PsqBase,
    value: *const c_char,
    out: *mut *mut c_char,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if base.is_null() {
            return fail_null("base");
        }
        if out.is_null() {
            return fail_null("out");
        }
        let text = match read_str(value, "value") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let x = match read_bigint(text, "value") {
            Ok(x) => x,
            Err(s) => return s,
        };
        give_string(out, (*base).0.strip_int(&x).to_string())
    })
}

/// ell_{b,d} of a decimal integer, as a new decimal string in `*out`.
///
/// # Safety
/// `base` must be a live handle, `value` a NUL-terminated string, and `out`
/// writable for one pointer.
#[no_mangle]
pub unsafe extern "C" fn psq_last_digits(
    base: *const PsqBase,
    value: *const c_char,
    d: u32,
    out: *mut *mut c_char,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if base.is_null() {
            return fail_null("base");
        }
        if out.is_null() {
            return fail_null("out");
        }
        if d == 0 {
            set_error("the digit width d must be at least 1");
            return PSQ_STATUS_DOMAIN_ERROR;
        }
        let text = match read_str(value, "value") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let x = match read_bigint(text, "value") {
            Ok(x) => x,
            Err(s) => return s,
        };
        give_string(out, (*base).0.last_digits_int(&x, d).to_string())
    })
}

/// The n-th term of the (a, b) Lucas sequence, as a new decimal string.
///
/// # Safety
/// `out` must be writable for one pointer.
#[no_mangle]
pub unsafe extern "C" fn psq_lucas_term(
    a: i64,
    b: i64,
    n: u64,
    out: *mut *mut c_char,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if out.is_null() {
            return fail_null("out");
        }
        match LucasParams::new(a, b) {
            Ok(p) => give_string(out, lucas_term(&p, n).to_string()),
            Err(e) => fail(&e),
        }
    })
}

/// nu_prime of the n-th (a, b) Lucas term through the closed formula
/// (no term is materialized). Output contract matches `psq_valuation`.
///
/// # Safety
/// `nu` and `infinite` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psq_lucas_valuation(
    a: i64,
    b: i64,
    prime: u64,
    n: u64,
    nu: *mut u64,
    infinite: *mut i32,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if nu.is_null() || infinite.is_null() {
            return fail_null("output");
        }
        let params = match LucasParams::new(a, b) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        };
        match sanna_valuation(&params, prime, n) {
            Ok(ExtendedNat::Finite(v)) => {
                *nu = v;
                *infinite = 0;
                PSQ_STATUS_OK
            }
            Ok(ExtendedNat::Infinity) => {
                *nu = 0;
                *infinite = 1;
                PSQ_STATUS_OK
            }
            Err(e) => fail(&e),
        }
    })
}

fn kind_name(kind: &Kind) -> &'static str {
    match kind {
        Kind::AllInfinite => "AllInfinite",
        Kind::Periodic { .. } => "Periodic",
        Kind::RegularAllK => "RegularAllK",
        Kind::StrictlyRegular { .. } => "StrictlyRegular",
        Kind::StrictlyAutomatic { .. } => "StrictlyAutomatic",
        Kind::NotRegular => "NotRegular",
        Kind::NotAutomatic => "NotAutomatic",
    }
}

fn kind_parameter(kind: &Kind) -> String {
    match kind {
        Kind::Periodic { period } => period.to_string(),
        Kind::StrictlyRegular { k } | Kind::StrictlyAutomatic { k } => k.to_string(),
        _ => String::new(),
    }
}

/// Classifies nu, L or ell of a polynomial tuple over base b.
///
/// `target` is "valuation", "lastnonzero" or "digits"; `d` is the digit
/// width for "digits" and ignored otherwise. `poly` uses '|' to separate
/// components, one per prime factor of b (one component total is used for
/// every factor). On success `*kind` names the class and `*parameter` holds
/// its period or k as a decimal string, empty when the class has none; both
/// are new strings.
///
/// # Safety
/// `target` and `poly` must be NUL-terminated strings; `kind` and
/// `parameter` writable for one pointer each.
#[no_mangle]
pub unsafe extern "C" fn psq_classify(
    b: u64,
    target: *const c_char,
    d: u32,
    poly: *const c_char,
    kind: *mut *mut c_char,
    parameter: *mut *mut c_char,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if kind.is_null() || parameter.is_null() {
            return fail_null("output");
        }
        let target = match read_str(target, "target") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let poly_text = match read_str(poly, "poly") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let body = || -> Result<Kind, Error> {
            let base = FactoredBase::new(b)?;
            let polys = parse_poly_tuple(poly_text)?;
            let ft = if polys.len() == 1 && base.num_primes() > 1 {
                FunctionTuple::diagonal(base, polys.into_iter().next().expect("one"))
            } else {
                FunctionTuple::new(base, polys)?
            };
            let classification = match target {
                "valuation" => classify_valuation(&ft)?,
                "lastnonzero" => classify_last_nonzero(&ft)?,
                "digits" => {
                    if d == 0 {
                        return Err(Error::domain(
                            "the digits target needs a width d >= 1".to_string(),
                        ));
                    }
                    classify_digits(&ft, d)?
                }
                other => {
                    return Err(Error::parse(format!(
                        "unknown target {:?}; use valuation, lastnonzero or digits",
                        other
                    )))
                }
            };
            Ok(classification.kind)
        };
        match body() {
            Ok(k) => {
                let status = give_string(kind, kind_name(&k).to_string());
                if status != PSQ_STATUS_OK {
                    return status;
                }
                let status = give_string(parameter, kind_parameter(&k));
                if status != PSQ_STATUS_OK {
                    psq_string_free(*kind);
                    *kind = std::ptr::null_mut();
                }
                status
            }
            Err(e) => fail(&e),
        }
    })
}

/// Classifies which (a, b) Lucas terms are not sums of three squares and
/// verifies the report against exact terms up to `verify_bound`.
///
/// # Safety
/// `out` must be writable for one pointer.
#[no_mangle]
pub unsafe extern "C" fn psq_three_squares(
    a: i64,
    b: i64,
    verify_bound: u64,
    out: *mut *mut PsqThreeSquares,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if out.is_null() {
            return fail_null("out");
        }
        let params = match LucasParams::new(a, b) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        };
        let report = match three_squares_classify(&params) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        if let Some(n) = three_squares_verify(&params, &report, verify_bound) {
            set_error(&format!(
                "the certified report disagrees with the exact term at n = {}",
                n
            ));
            return PSQ_STATUS_PRECISION_ERROR;
        }
        *out = Box::into_raw(Box::new(PsqThreeSquares(report)));
        PSQ_STATUS_OK
    })
}

/// Releases a three-squares report. NULL is ignored.
///
/// # Safety
/// `report` must be NULL or an unfreed handle from `psq_three_squares`.
#[no_mangle]
pub unsafe extern "C" fn psq_three_squares_free(report: *mut PsqThreeSquares) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// The index multiplier pi of a report; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psq_three_squares_pi(report: *const PsqThreeSquares) -> u64 {
    if report.is_null() {
        0
    } else {
        (*report).0.pi()
    }
}

/// How many exceptional progressions and families a report lists.
///
/// # Safety
/// `report` must be a live handle; `progressions` and `families` writable.
#[no_mangle]
pub unsafe extern "C" fn psq_three_squares_counts(
    report: *const PsqThreeSquares,
    progressions: *mut usize,
    families: *mut usize,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if report.is_null() {
            return fail_null("report");
        }
        if progressions.is_null() || families.is_null() {
            return fail_null("output");
        }
        *progressions = (*report).0.progressions().len();
        *families = (*report).0.families().len();
        PSQ_STATUS_OK
    })
}

/// The i-th exceptional progression: indices n = residue mod (pi * 2^t).
///
/// # Safety
/// `report` must be a live handle; `t` and `residue` writable.
#[no_mangle]
pub unsafe extern "C" fn psq_three_squares_progression(
    report: *const PsqThreeSquares,
    i: usize,
    t: *mut u32,
    residue: *mut u64,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if report.is_null() {
            return fail_null("report");
        }
        if t.is_null() || residue.is_null() {
            return fail_null("output");
        }
        match (*report).0.progressions().get(i) {
            Some(&(pt, pj)) => {
                *t = pt;
                *residue = pj;
                PSQ_STATUS_OK
            }
            None => {
                set_error(&format!("progression index {} out of range", i));
                PSQ_STATUS_DOMAIN_ERROR
            }
        }
    })
}

/// The i-th exceptional family: indices n = pi * 2^t * 4^k * (8 l + c).
///
/// # Safety
/// `report` must be a live handle; `t` and `c` writable.
#[no_mangle]
pub unsafe extern "C" fn psq_three_squares_family(
    report: *const PsqThreeSquares,
    i: usize,
    t: *mut u32,
    c: *mut u8,
) -> PsqStatus {
    guarded(|| {
        clear_error();
        if report.is_null() {
            return fail_null("report");
        }
        if t.is_null() || c.is_null() {
            return fail_null("output");
        }
        match (*report).0.families().get(i) {
            Some(&(ft, fc)) => {
                *t = ft;
                *c = fc;
                PSQ_STATUS_OK
            }
            None => {
                set_error(&format!("family index {} out of range", i));
                PSQ_STATUS_DOMAIN_ERROR
            }
        }
    })
}

/// Whether index n is in the report's exceptional set: 1 yes, 0 no,
/// -1 for a NULL report.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psq_three_squares_contains(report: *const PsqThreeSquares, n: u64) -> i32 {
    if report.is_null() {
        return -1;
    }
    i32::from((*report).0.contains(n))
}
