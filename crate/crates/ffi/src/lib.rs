//! C ABI over `torsion-forge`.
//!
//! Objects are opaque heap handles released with their matching `*_free`.
//! Every fallible call returns a [`TfStatus`]; on failure the message is
//! available from [`tf_last_error`] on the same thread. Strings handed out by
//! the library are released with [`tf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;
use torsion_forge::cli::{self, Failure};
use torsion_forge::counting::{make_curve, Strategy, TraceMode};
use torsion_forge::ffield::make_extension;
use torsion_forge::jacobian::{random_divisor, HyperellipticModel, JacobianError, MumfordDivisor};
use torsion_forge::torsion::{self, RankReport, RankMode, TorsionError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    BudgetExceeded = 4,
    AssertionFailed = 5,
    Panic = 6,
}

/// A curve `y^2 = F(x)` with odd-degree squarefree `F`.
pub struct TfModel {
    inner: HyperellipticModel,
}

/// A reduced divisor class on some [`TfModel`].
pub struct TfDivisor {
    inner: MumfordDivisor,
}

/// Result of a rank computation.
pub struct TfRankReport {
    inner: RankReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(TfStatus, String);

impl From<Failure> for Fail {
    fn from(f: Failure) -> Self {
        let status = match f.code {
            cli::EXIT_USAGE => TfStatus::InvalidArgument,
            cli::EXIT_BUDGET => TfStatus::BudgetExceeded,
            _ => TfStatus::AssertionFailed,
        };
        Fail(status, f.message)
    }
}

impl From<TorsionError> for Fail {
    fn from(e: TorsionError) -> Self {
        if matches!(e, TorsionError::Inadmissible { .. }) {
            return Fail(TfStatus::Inadmissible, e.to_string());
        }
        Failure::from(e).into()
    }
}

impl From<JacobianError> for Fail {
    fn from(e: JacobianError) -> Self {
        Failure::from(e).into()
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(TfStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            TfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(TfStatus::NullPointer, "null handle".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(TfStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn effective_budget(budget: u64) -> u64 {
    if budget == 0 {
        cli::resolve_budget(None, std::env::var(cli::BUDGET_ENV).ok()).unwrap_or(1 << 26)
    } else {
        budget
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `#C(F_{p^(2s)})` for `y^2 = x^(p^(2m)) - x`, as a decimal string.
/// A `budget` of 0 means the environment or built-in default.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_count_points(p: u64, m: u64, s: u64, budget: u64, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        if s == 0 {
            return Err(invalid("s must be positive"));
        }
        let curve = make_curve(p, m).map_err(Failure::from)?;
        let n = curve
            .count_over(s, Strategy::Auto, effective_budget(budget))
            .map_err(Failure::from)?;
        write_out(out, to_c_string(n.to_string()))
    })
}

/// Rank of the `ell`-torsion of the Jacobian of `y^2 = x^(p^(2m)) - x` over
/// `F_{p^2}`; an interval when exact counting is over budget.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_rank_new(p: u64, ell: u64, m: u64, budget: u64, out: *mut *mut TfRankReport) -> TfStatus {
    guard(|| {
        let params = torsion::validate_family(p, ell, m)?;
        let report = torsion::rank(&params, TraceMode::Force, Strategy::Auto, effective_budget(budget))?;
        write_out(out, Box::into_raw(Box::new(TfRankReport { inner: report })))
    })
}

/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn tf_rank_is_exact(r: *const TfRankReport) -> bool {
    r.as_ref().is_some_and(|r| r.inner.mode == RankMode::Exact)
}

/// The exact rank as a decimal string; `TF_STATUS_INVALID_ARGUMENT` for an
/// interval report.
///
/// # Safety
/// `r` must be a live report handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_rank_value(r: *const TfRankReport, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let r = deref(r)?;
        let rank = r.inner.rank.as_ref().ok_or_else(|| invalid("rank is only known as an interval"))?;
        write_out(out, to_c_string(rank.to_string()))
    })
}

/// Bracket `lo <= rank <= hi` as decimal strings; equal ends for exact reports.
///
/// # Safety
/// `r` must be a live report handle; `lo` and `hi` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_rank_interval(r: *const TfRankReport, lo: *mut *mut c_char, hi: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let r = deref(r)?;
        if lo.is_null() || hi.is_null() {
            return Err(Fail(TfStatus::NullPointer, "null output pointer".into()));
        }
        write_out(lo, to_c_string(r.inner.rank_lo.to_string()))?;
        write_out(hi, to_c_string(r.inner.rank_hi.to_string()))
    })
}

/// # Safety
/// `r` must be NULL or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_rank_free(r: *mut TfRankReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// `y^2 = x^q - x` over `F_{p^n}`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_model_new_artin_schreier(p: u64, n: usize, q: usize, out: *mut *mut TfModel) -> TfStatus {
    guard(|| {
        let ctx = make_extension(p, n).map_err(|e| invalid(e.to_string()))?;
        let model = HyperellipticModel::artin_schreier(&ctx, q)?;
        write_out(out, Box::into_raw(Box::new(TfModel { inner: model })))
    })
}

/// `y^2 = c h(x)` over `F_{p^n}`, with `h` given by `len` prime-field
/// coefficients, lowest degree first.
///
/// # Safety
/// `coeffs` must point to `len` readable values; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_model_new_prime_coeffs(
    p: u64,
    n: usize,
    coeffs: *const u64,
    len: usize,
    c: u64,
    out: *mut *mut TfModel,
) -> TfStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(Fail(TfStatus::NullPointer, "null coefficient array".into()));
        }
        let h = std::slice::from_raw_parts(coeffs, len);
        let ctx = make_extension(p, n).map_err(|e| invalid(e.to_string()))?;
        let model = HyperellipticModel::from_prime_coeffs(&ctx, h, c)?;
        write_out(out, Box::into_raw(Box::new(TfModel { inner: model })))
    })
}

/// Genus, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn tf_model_genus(m: *const TfModel) -> usize {
    m.as_ref().map_or(0, |m| m.inner.genus())
}

/// # Safety
/// `m` must be NULL or a model handle not yet freed. Divisors created on it
/// must not be used with any other model afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_model_free(m: *mut TfModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn emit_divisor(out: *mut *mut TfDivisor, d: MumfordDivisor) -> Result<(), Fail> {
    write_out(out, Box::into_raw(Box::new(TfDivisor { inner: d })))
}

unsafe fn checked<'a>(m: &TfModel, d: *const TfDivisor) -> Result<&'a MumfordDivisor, Fail> {
    let d = &deref(d)?.inner;
    m.inner.validate(d)?;
    Ok(d)
}

/// The neutral class.
///
/// # Safety
/// `m` must be a live model handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_identity(m: *const TfModel, out: *mut *mut TfDivisor) -> TfStatus {
    guard(|| emit_divisor(out, deref(m)?.inner.identity()))
}

/// A seeded random class; the same seed gives the same class.
///
/// # Safety
/// `m` must be a live model handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_random(m: *const TfModel, seed: u64, out: *mut *mut TfDivisor) -> TfStatus {
    guard(|| {
        let m = deref(m)?;
        emit_divisor(out, random_divisor(&m.inner, seed)?)
    })
}

/// `a + b`.
///
/// # Safety
/// All handles must be live, `a` and `b` on model `m`; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_add(
    m: *const TfModel,
    a: *const TfDivisor,
    b: *const TfDivisor,
    out: *mut *mut TfDivisor,
) -> TfStatus {
    guard(|| {
        let m = deref(m)?;
        let sum = m.inner.cantor_add(checked(m, a)?, checked(m, b)?);
        emit_divisor(out, sum)
    })
}

/// `-a`.
///
/// # Safety
/// As for [`tf_divisor_add`].
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_negate(m: *const TfModel, a: *const TfDivisor, out: *mut *mut TfDivisor) -> TfStatus {
    guard(|| {
        let m = deref(m)?;
        let neg = m.inner.negate(checked(m, a)?);
        emit_divisor(out, neg)
    })
}

/// `n a` with `n` a non-negative decimal string.
///
/// # Safety
/// As for [`tf_divisor_add`]; `n` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_scalar_mul(
    m: *const TfModel,
    n: *const c_char,
    a: *const TfDivisor,
    out: *mut *mut TfDivisor,
) -> TfStatus {
    guard(|| {
        let m = deref(m)?;
        if n.is_null() {
            return Err(Fail(TfStatus::NullPointer, "null scalar".into()));
        }
        let text = CStr::from_ptr(n).to_str().map_err(|_| invalid("scalar is not UTF-8"))?;
        let k: BigUint = text.trim().parse().map_err(|_| invalid(format!("bad scalar {text:?}")))?;
        let prod = m.inner.scalar_mul(&k, checked(m, a)?);
        emit_divisor(out, prod)
    })
}

/// # Safety
/// `d` must be NULL or a live divisor handle.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_is_identity(d: *const TfDivisor) -> bool {
    d.as_ref().is_some_and(|d| d.inner.is_identity())
}

/// Equality of reduced representatives; false if either is NULL.
///
/// # Safety
/// `a` and `b` must be NULL or live divisor handles.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_equal(a: *const TfDivisor, b: *const TfDivisor) -> bool {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => a.inner == b.inner,
        _ => false,
    }
}

/// `deg u`, or 0 for NULL.
///
/// # Safety
/// `d` must be NULL or a live divisor handle.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_weight(d: *const TfDivisor) -> usize {
    d.as_ref().map_or(0, |d| d.inner.weight())
}

/// # Safety
/// `d` must be NULL or a divisor handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tf_divisor_free(d: *mut TfDivisor) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Run a command-line invocation (without the program name) and return the
/// rendered report. `exit_code` receives the code the command-line tool would
/// exit with. `--out` is ignored.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out` and `exit_code`
/// must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn tf_run(
    argv: *const *const c_char,
    argc: usize,
    out: *mut *mut c_char,
    exit_code: *mut i32,
) -> TfStatus {
    guard(|| {
        if (argv.is_null() && argc > 0) || out.is_null() || exit_code.is_null() {
            return Err(Fail(TfStatus::NullPointer, "null argument".into()));
        }
        let mut args = vec!["torsion-forge".to_string()];
        for i in 0..argc {
            let a = *argv.add(i);
            if a.is_null() {
                return Err(Fail(TfStatus::NullPointer, format!("argv[{i}] is null")));
            }
            args.push(CStr::from_ptr(a).to_str().map_err(|_| invalid("argument is not UTF-8"))?.to_string());
        }
        match cli::report_from_args(args) {
            Ok((code, text)) => {
                write_out(exit_code, code)?;
                write_out(out, to_c_string(text))
            }
            Err(f) => {
                write_out(exit_code, f.code)?;
                Err(f.into())
            }
        }
    })
}
