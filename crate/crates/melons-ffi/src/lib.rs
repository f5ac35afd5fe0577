//! C ABI over the melons library.
//!
//! Every entry point is panic-safe and returns a status code matching the
//! CLI exit-code contract: 0 success, 2 usage error, 3 internal-consistency
//! failure, 4 numeric failure. Failure detail for the most recent call on
//! the current thread is available from [`melon_last_error_message`].
//!
//! Ownership rules: contexts come from [`melon_context_new`] and are
//! released with [`melon_context_free`]; every string written to an
//! out-parameter (and the one returned by [`melon_last_error_message`]) is
//! released with [`melon_string_free`]. Out-parameters are written only on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use melons::asym::{convergence_ratio, h2_coefficient};
use melons::dirichlet::{ConstantsSource, QuadratureConstants};
use melons::error::MelonError;
use melons::exact::{avg_height_exact, capped_melon_count, count_melons};
use melons::hp::{decimal_string, HPReal, MIN_PRECISION_BITS};

/// Status code returned by every fallible call; aligned with the CLI exit
/// codes so embedders and scripts see one error contract.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MelonStatus {
    /// The call succeeded and all out-parameters are valid.
    Ok = 0,
    /// A precondition on the inputs was violated (bad handle, range, parse).
    Usage = 2,
    /// Two routes that must agree exactly did not; always a library bug.
    Internal = 3,
    /// A numeric routine failed to converge within its budget.
    Numeric = 4,
}

/// Opaque evaluation context: working precision, tolerance, and a memoized
/// table of the Dirichlet-series constants shared across calls.
pub struct MelonContext {
    prec: usize,
    constants: QuadratureConstants,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: MelonStatus, msg: String) -> MelonStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
    status
}

fn fail_with(err: MelonError) -> MelonStatus {
    let status = match err {
        MelonError::Domain(_) => MelonStatus::Usage,
        MelonError::Internal(_) => MelonStatus::Internal,
        MelonError::Numeric(_) => MelonStatus::Numeric,
    };
    fail(status, err.to_string())
}

fn guarded(f: impl FnOnce() -> MelonStatus) -> MelonStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(MelonStatus::Internal, "panic caught at the C boundary".into()),
    }
}

/// Writes `text` to the string out-parameter. Only called on success paths;
/// the text never contains interior NUL bytes.
unsafe fn write_string(out: *mut *mut c_char, text: String) -> MelonStatus {
    let c = CString::new(text).expect("library strings carry no NUL bytes");
    unsafe { *out = c.into_raw() };
    MelonStatus::Ok
}

fn context<'a>(ctx: *const MelonContext) -> Result<&'a MelonContext, MelonStatus> {
    match unsafe { ctx.as_ref() } {
        Some(c) => Ok(c),
        None => Err(fail(MelonStatus::Usage, "context handle is NULL".into())),
    }
}

fn require_out<T>(out: *mut T) -> Result<(), MelonStatus> {
    if out.is_null() {
        Err(fail(MelonStatus::Usage, "out-parameter is NULL".into()))
    } else {
        Ok(())
    }
}

/// Creates an evaluation context with the given working precision in bits
/// (at least 53) and truncation/quadrature tolerance as a decimal string
/// (NULL selects the default "1e-12"). Returns NULL on invalid input, with
/// the detail available from `melon_last_error_message`. Release with
/// `melon_context_free`.
#[no_mangle]
pub extern "C" fn melon_context_new(
    precision_bits: u32,
    tol: *const c_char,
) -> *mut MelonContext {
    let mut handle: *mut MelonContext = std::ptr::null_mut();
    guarded(|| {
        let prec = precision_bits as usize;
        if prec < MIN_PRECISION_BITS {
            return fail(
                MelonStatus::Usage,
                format!("precision_bits must be at least {MIN_PRECISION_BITS}, got {prec}"),
            );
        }
        let tol_str = if tol.is_null() {
            "1e-12".to_string()
        } else {
            match unsafe { CStr::from_ptr(tol) }.to_str() {
                Ok(s) => s.to_string(),
                Err(_) => return fail(MelonStatus::Usage, "tol is not valid UTF-8".into()),
            }
        };
        let t = match HPReal::parse(&tol_str, prec) {
            Ok(t) => t,
            Err(e) => return fail_with(e),
        };
        if t.is_zero() || t.is_negative() {
            return fail(MelonStatus::Usage, format!("tol must be positive, got {tol_str}"));
        }
        handle = Box::into_raw(Box::new(MelonContext {
            prec,
            constants: QuadratureConstants::new(t, prec),
        }));
        MelonStatus::Ok
    });
    handle
}

/// Releases a context created by `melon_context_new`. NULL is ignored.
#[no_mangle]
pub extern "C" fn melon_context_free(ctx: *mut MelonContext) {
    if !ctx.is_null() {
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// Releases any string returned by this library. NULL is ignored.
#[no_mangle]
pub extern "C" fn melon_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Returns the failure detail of the most recent call on this thread as a
/// newly allocated string (empty when that call succeeded). The caller
/// releases it with `melon_string_free`.
#[no_mangle]
pub extern "C" fn melon_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .clone()
            .unwrap_or_else(|| CString::new("").expect("empty string has no NUL"))
            .into_raw()
    })
}

/// Exact number of p-watermelon configurations of half-length n, written to
/// `*out` as a decimal integer string.
#[no_mangle]
pub extern "C" fn melon_count(
    ctx: *const MelonContext,
    n: u64,
    p: u64,
    out: *mut *mut c_char,
) -> MelonStatus {
    guarded(|| {
        if let Err(s) = context(ctx) {
            return s;
        }
        if let Err(s) = require_out(out) {
            return s;
        }
        match count_melons(n, p) {
            Ok(v) => unsafe { write_string(out, v.to_string()) },
            Err(e) => fail_with(e),
        }
    })
}

/// Exact number of p-watermelon configurations of height at most `h`,
/// written to `*out` as a decimal integer string.
#[no_mangle]
pub extern "C" fn melon_count_capped(
    ctx: *const MelonContext,
    n: u64,
    p: u64,
    h: u64,
    out: *mut *mut c_char,
) -> MelonStatus {
    guarded(|| {
        if let Err(s) = context(ctx) {
            return s;
        }
        if let Err(s) = require_out(out) {
            return s;
        }
        if n < 1 || p < 1 {
            return fail(MelonStatus::Usage, format!("requires n, p >= 1, got ({n},{p})"));
        }
        unsafe { write_string(out, capped_melon_count(n, p, h).to_string()) }
    })
}

/// Exact average height H(n,p) written to `*out` as "numerator/denominator".
#[no_mangle]
pub extern "C" fn melon_height_exact(
    ctx: *const MelonContext,
    n: u64,
    p: u64,
    out: *mut *mut c_char,
) -> MelonStatus {
    guarded(|| {
        if let Err(s) = context(ctx) {
            return s;
        }
        if let Err(s) = require_out(out) {
            return s;
        }
        match avg_height_exact(n, p) {
            Ok(v) => unsafe { write_string(out, format!("{}/{}", v.numer(), v.denom())) },
            Err(e) => fail_with(e),
        }
    })
}

/// Exact average height H(n,p) rendered as a decimal string with `digits`
/// significant digits, round-half-even.
#[no_mangle]
pub extern "C" fn melon_height_decimal(
    ctx: *const MelonContext,
    n: u64,
    p: u64,
    digits: u32,
    out: *mut *mut c_char,
) -> MelonStatus {
    guarded(|| {
        if let Err(s) = context(ctx) {
            return s;
        }
        if let Err(s) = require_out(out) {
            return s;
        }
        if digits < 1 {
            return fail(MelonStatus::Usage, "digits must be at least 1".into());
        }
        match avg_height_exact(n, p) {
            Ok(v) => unsafe { write_string(out, decimal_string(&v, digits as usize)) },
            Err(e) => fail_with(e),
        }
    })
}

/// Convergence ratio q(n) = H(n,2)/(2.57758·√n − 2), written to `*out` as a
/// double.
#[no_mangle]
pub extern "C" fn melon_convergence_ratio(
    ctx: *const MelonContext,
    n: u64,
    out: *mut f64,
) -> MelonStatus {
    guarded(|| {
        let c = match context(ctx) {
            Ok(c) => c,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out) {
            return s;
        }
        match convergence_ratio(n, c.prec) {
            Ok(q) => {
                unsafe { *out = q.to_f64() };
                MelonStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Dirichlet-series expansion constant c_{a,b}, computed by the context's
/// quadrature (memoized per index pair), written to `*out` as a double.
#[no_mangle]
pub extern "C" fn melon_dirichlet_constant(
    ctx: *const MelonContext,
    a: u32,
    b: u32,
    out: *mut f64,
) -> MelonStatus {
    guarded(|| {
        let c = match context(ctx) {
            Ok(c) => c,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out) {
            return s;
        }
        match c.constants.c_ab(a, b) {
            Ok(v) => {
                unsafe { *out = v.to_f64() };
                MelonStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// The √(πn)-coefficient K of the two-path average height and K·√π (the
/// display normalization), derived from the context's constants. Both
/// out-parameters are written on success.
#[no_mangle]
pub extern "C" fn melon_height_coefficient(
    ctx: *const MelonContext,
    out_k: *mut f64,
    out_k_sqrt_pi: *mut f64,
) -> MelonStatus {
    guarded(|| {
        let c = match context(ctx) {
            Ok(c) => c,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out_k) {
            return s;
        }
        if let Err(s) = require_out(out_k_sqrt_pi) {
            return s;
        }
        match h2_coefficient(&c.constants) {
            Ok(coeff) => {
                let wp = c.prec + 16;
                let k_pi = coeff.k.round_to(wp).mul(&HPReal::pi(wp).sqrt());
                unsafe {
                    *out_k = coeff.k.to_f64();
                    *out_k_sqrt_pi = k_pi.to_f64();
                }
                MelonStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
        melon_string_free(ptr);
        s
    }

    fn last_error() -> String {
        take_string(melon_last_error_message())
    }

    fn ctx_with_tol(tol: &str) -> *mut MelonContext {
        let tol = CString::new(tol).unwrap();
        let ctx = melon_context_new(128, tol.as_ptr());
        assert!(!ctx.is_null(), "context creation failed: {}", last_error());
        ctx
    }

    #[test]
    fn counts_and_heights_round_trip() {
        let ctx = ctx_with_tol("1e-12");
        let mut s: *mut c_char = std::ptr::null_mut();

        assert_eq!(melon_count(ctx, 3, 2, &mut s), MelonStatus::Ok);
        assert_eq!(take_string(s), "14");

        assert_eq!(melon_count_capped(ctx, 2, 2, 2, &mut s), MelonStatus::Ok);
        assert_eq!(take_string(s), "0");

        assert_eq!(melon_height_exact(ctx, 2, 2, &mut s), MelonStatus::Ok);
        assert_eq!(take_string(s), "11/3");

        assert_eq!(melon_height_decimal(ctx, 2, 2, 4, &mut s), MelonStatus::Ok);
        assert_eq!(take_string(s), "3.667");

        melon_context_free(ctx);
    }

    #[test]
    fn doubles_round_trip() {
        let ctx = ctx_with_tol("1e-6"); // loose quadrature keeps this fast
        let mut q = 0.0f64;
        assert_eq!(melon_convergence_ratio(ctx, 100, &mut q), MelonStatus::Ok);
        assert!((q - 1.032048).abs() < 1e-5, "q(100) = {q}");

        let mut c00 = 0.0f64;
        assert_eq!(melon_dirichlet_constant(ctx, 0, 0, &mut c00), MelonStatus::Ok);
        assert!((c00 + 1.552282).abs() < 1e-4, "c_00 = {c00}");

        let (mut k, mut k_pi) = (0.0f64, 0.0f64);
        assert_eq!(melon_height_coefficient(ctx, &mut k, &mut k_pi), MelonStatus::Ok);
        assert!((k - 1.454245).abs() < 1e-4, "K = {k}");
        assert!((k_pi - 2.57758).abs() < 5e-4, "K*sqrt(pi) = {k_pi}");

        melon_context_free(ctx);
    }

    #[test]
    fn error_contract() {
        // invalid construction returns NULL and leaves a message
        let bad = CString::new("0").unwrap();
        assert!(melon_context_new(128, bad.as_ptr()).is_null());
        assert!(last_error().contains("positive"));
        assert!(melon_context_new(10, std::ptr::null()).is_null());

        let ctx = ctx_with_tol("1e-12");
        let mut s: *mut c_char = std::ptr::null_mut();

        // NULL handle and NULL out-parameter are usage errors
        assert_eq!(melon_count(std::ptr::null(), 3, 2, &mut s), MelonStatus::Usage);
        assert_eq!(melon_count(ctx, 3, 2, std::ptr::null_mut()), MelonStatus::Usage);

        // domain violations surface as usage, and the message survives
        assert_eq!(melon_count(ctx, 0, 2, &mut s), MelonStatus::Usage);
        assert!(last_error().contains("n,p >= 1"));
        assert!(s.is_null(), "out-parameters stay untouched on failure");

        // success clears the sticky message
        assert_eq!(melon_count(ctx, 3, 1, &mut s), MelonStatus::Ok);
        assert_eq!(take_string(s), "5");
        assert_eq!(last_error(), "");

        melon_context_free(ctx);
        melon_context_free(std::ptr::null_mut());
        melon_string_free(std::ptr::null_mut());
    }
}
