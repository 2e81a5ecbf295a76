//! Drives the C entry points the way a foreign caller would: through raw
//! pointers, checking status codes, output params, and the error channel.

use std::ffi::{CStr, CString};
use std::ptr;

use padiseq_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).expect("no interior NUL")
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null(), "string result must not be NULL");
    let text = CStr::from_ptr(p).to_str().expect("UTF-8").to_string();
    psq_string_free(p);
    text
}

unsafe fn last_error() -> String {
    CStr::from_ptr(psq_last_error())
        .to_str()
        .expect("UTF-8")
        .to_string()
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(psq_version()) }
        .to_str()
        .expect("UTF-8");
    assert!(!v.is_empty());
    assert!(v.split('.').count() >= 2, "version {:?}", v);
}

#[test]
fn digit_primitives_round_trip() {
    unsafe {
        let mut base: *mut PsqBase = ptr::null_mut();
        assert_eq!(psq_base_new(6, &mut base), PsqStatus::PSQ_STATUS_OK);
        assert_eq!(psq_base_value(base), 6);

        let value = cstr("2400");
        let (mut nu, mut infinite) = (u64::MAX, -1);
        assert_eq!(
            psq_valuation(base, value.as_ptr(), &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!((nu, infinite), (1, 0));

        let mut out = ptr::null_mut();
        assert_eq!(
            psq_last_nonzero(base, value.as_ptr(), &mut out),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(take_string(out), "400");

        let mut out = ptr::null_mut();
        assert_eq!(
            psq_last_digits(base, value.as_ptr(), 2, &mut out),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(take_string(out), "4");

        let zero = cstr("0");
        assert_eq!(
            psq_valuation(base, zero.as_ptr(), &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(
            (nu, infinite),
            (0, 1),
            "the zero value has infinite valuation"
        );

        let negative = cstr("-2400");
        assert_eq!(
            psq_valuation(base, negative.as_ptr(), &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!((nu, infinite), (1, 0), "valuation ignores the sign");

        psq_base_free(base);
    }
}

#[test]
fn rejections_set_codes_and_messages() {
    unsafe {
        let mut base: *mut PsqBase = ptr::null_mut();
        assert_eq!(
            psq_base_new(1, &mut base),
            PsqStatus::PSQ_STATUS_DOMAIN_ERROR
        );
        assert!(!last_error().is_empty());
        assert!(base.is_null(), "no handle on failure");

        assert_eq!(psq_base_new(6, &mut base), PsqStatus::PSQ_STATUS_OK);
        assert!(last_error().is_empty(), "success clears the error");

        let (mut nu, mut infinite) = (0u64, 0);
        assert_eq!(
            psq_valuation(ptr::null(), cstr("5").as_ptr(), &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_NULL_ARGUMENT
        );
        assert_eq!(
            psq_valuation(base, ptr::null(), &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_NULL_ARGUMENT
        );
        assert_eq!(
            psq_valuation(base, cstr("twelve").as_ptr(), &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_PARSE_ERROR
        );
        assert!(last_error().contains("twelve"), "message names the input");

        let mut out = ptr::null_mut();
        assert_eq!(
            psq_last_digits(base, cstr("7").as_ptr(), 0, &mut out),
            PsqStatus::PSQ_STATUS_DOMAIN_ERROR
        );

        psq_base_free(base);
        psq_base_free(ptr::null_mut());
        psq_string_free(ptr::null_mut());
    }
}

#[test]
fn lucas_entry_points() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(psq_lucas_term(2, 1, 20, &mut out), PsqStatus::PSQ_STATUS_OK);
        assert_eq!(take_string(out), "15994428");

        let (mut nu, mut infinite) = (0u64, -1);
        assert_eq!(
            psq_lucas_valuation(1, 1, 2, 6, &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!((nu, infinite), (3, 0), "F_6 = 8");
        assert_eq!(
            psq_lucas_valuation(1, 1, 2, 0, &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(infinite, 1, "u_0 = 0");
        assert_eq!(
            psq_lucas_valuation(1, 3, 3, 5, &mut nu, &mut infinite),
            PsqStatus::PSQ_STATUS_DOMAIN_ERROR,
            "p | B is out of scope"
        );
    }
}

#[test]
fn classify_returns_kind_and_parameter() {
    unsafe {
        let mut kind = ptr::null_mut();
        let mut parameter = ptr::null_mut();
        assert_eq!(
            psq_classify(
                50,
                cstr("valuation").as_ptr(),
                0,
                cstr("x | x^2").as_ptr(),
                &mut kind,
                &mut parameter,
            ),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(take_string(kind), "StrictlyRegular");
        assert_eq!(take_string(parameter), "100");

        let mut kind = ptr::null_mut();
        let mut parameter = ptr::null_mut();
        assert_eq!(
            psq_classify(
                10,
                cstr("valuation").as_ptr(),
                0,
                cstr("x^2+1").as_ptr(),
                &mut kind,
                &mut parameter,
            ),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(take_string(kind), "Periodic");
        assert!(!take_string(parameter).is_empty(), "a period is reported");

        let mut kind = ptr::null_mut();
        let mut parameter = ptr::null_mut();
        assert_eq!(
            psq_classify(
                5,
                cstr("digits").as_ptr(),
                2,
                cstr("5*(x^2+1)^4").as_ptr(),
                &mut kind,
                &mut parameter,
            ),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(take_string(kind), "NotAutomatic");
        assert_eq!(take_string(parameter), "");

        assert_eq!(
            psq_classify(
                10,
                cstr("digits").as_ptr(),
                0,
                cstr("x").as_ptr(),
                &mut kind,
                &mut parameter,
            ),
            PsqStatus::PSQ_STATUS_DOMAIN_ERROR,
            "digits needs d >= 1"
        );
        assert_eq!(
            psq_classify(
                10,
                cstr("everything").as_ptr(),
                0,
                cstr("x").as_ptr(),
                &mut kind,
                &mut parameter,
            ),
            PsqStatus::PSQ_STATUS_PARSE_ERROR
        );
        assert_eq!(
            psq_classify(
                10,
                cstr("valuation").as_ptr(),
                0,
                cstr("x +").as_ptr(),
                &mut kind,
                &mut parameter,
            ),
            PsqStatus::PSQ_STATUS_PARSE_ERROR
        );
    }
}

#[test]
fn three_squares_report_surface() {
    unsafe {
        let mut report: *mut PsqThreeSquares = ptr::null_mut();
        assert_eq!(
            psq_three_squares(2, 1, 400, &mut report),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(psq_three_squares_pi(report), 4);

        let (mut n_prog, mut n_fam) = (usize::MAX, usize::MAX);
        assert_eq!(
            psq_three_squares_counts(report, &mut n_prog, &mut n_fam),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!((n_prog, n_fam), (0, 1));

        let (mut t, mut c) = (u32::MAX, u8::MAX);
        assert_eq!(
            psq_three_squares_family(report, 0, &mut t, &mut c),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!((t, c), (0, 5), "4^(k+1) (8l+5)");
        assert_eq!(
            psq_three_squares_family(report, 1, &mut t, &mut c),
            PsqStatus::PSQ_STATUS_DOMAIN_ERROR,
            "index out of range"
        );

        assert_eq!(
            psq_three_squares_contains(report, 20),
            1,
            "P_20 is exceptional"
        );
        assert_eq!(
            psq_three_squares_contains(report, 12),
            0,
            "P_12 is a sum of three squares"
        );
        assert_eq!(psq_three_squares_contains(ptr::null(), 20), -1);

        psq_three_squares_free(report);
        psq_three_squares_free(ptr::null_mut());

        let mut report: *mut PsqThreeSquares = ptr::null_mut();
        assert_eq!(
            psq_three_squares(2, 2, 100, &mut report),
            PsqStatus::PSQ_STATUS_DOMAIN_ERROR,
            "even B is out of scope"
        );
        assert!(report.is_null());
    }
}

#[test]
fn fibonacci_report_matches_the_exceptional_set() {
    unsafe {
        let mut report: *mut PsqThreeSquares = ptr::null_mut();
        assert_eq!(
            psq_three_squares(1, 1, 400, &mut report),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!(psq_three_squares_pi(report), 6);

        let (mut t, mut j) = (u32::MAX, u64::MAX);
        assert_eq!(
            psq_three_squares_progression(report, 0, &mut t, &mut j),
            PsqStatus::PSQ_STATUS_OK
        );
        assert_eq!((t, j), (1, 10), "12 l + 10");

        for n in [10u64, 22, 34, 84] {
            assert_eq!(psq_three_squares_contains(report, n), 1, "n = {}", n);
        }
        for n in [0u64, 1, 12, 30] {
            assert_eq!(psq_three_squares_contains(report, n), 0, "n = {}", n);
        }
        psq_three_squares_free(report);
    }
}
