//! C interface: opaque handles for zero sets and curves, status codes, and
//! a per-thread last-error message.
//!
//! Strings returned by the library are owned by the caller and must be
//! released with `szego_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use szego_core::cli::{curve_spec, verify_json};
use szego_core::curves::{sample_curve_bits, Polyline, DEFAULT_BITS};
use szego_core::roots::{section_zeros, ZeroSet};
use szego_core::series::SeriesSpec;
use szego_core::{Error, PrecisionPolicy};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SzegoStatus {
    Ok = 0,
    /// A null pointer, bad UTF-8 or an index out of range.
    InvalidArgument = 1,
    /// Unknown family, suite or malformed JSON parameters.
    Config = 2,
    /// The root finder or a Newton/quadrature loop gave up.
    NoConvergence = 3,
    /// A numerical domain or precondition error.
    Domain = 4,
    /// A verification suite ran and its criteria were not met.
    VerificationFailed = 5,
    Panic = 6,
}

/// Zeros of one section, origin zeros first.
pub struct SzegoZeroSet {
    inner: ZeroSet,
}

/// A sampled limit curve, pieces concatenated.
pub struct SzegoCurve {
    inner: Polyline,
    points: Vec<(f64, f64)>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SzegoStatus {
    match e {
        Error::RootNoConvergence { .. }
        | Error::NewtonNoConvergence(_)
        | Error::QuadratureNoConvergence { .. }
        | Error::Bracketing { .. }
        | Error::PrecisionOverflow(_) => SzegoStatus::NoConvergence,
        Error::Config(_) | Error::Parse(_) | Error::Json(_) | Error::Family(_) => {
            SzegoStatus::Config
        }
        Error::InvalidParameter(_)
        | Error::InvalidPolicy(_)
        | Error::Parity(_)
        | Error::EmptySelection { .. } => SzegoStatus::InvalidArgument,
        _ => SzegoStatus::Domain,
    }
}

/// Runs `f`, turning errors and panics into a status and the last-error text.
fn guard<F: FnOnce() -> Result<SzegoStatus, (SzegoStatus, String)>>(f: F) -> SzegoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            if s == SzegoStatus::Ok {
                set_error("");
            }
            s
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            SzegoStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (SzegoStatus, String) {
    (status_of(&e), e.to_string())
}

fn invalid(msg: &str) -> (SzegoStatus, String) {
    (SzegoStatus::InvalidArgument, msg.to_string())
}

/// # Safety
/// `s` is null or a NUL-terminated string.
unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<Option<&'a str>, (SzegoStatus, String)> {
    if s.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(s)
        .to_str()
        .map(Some)
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn szego_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn szego_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Zeros of the normalized degree-n section of `family` (a preset name or a
/// JSON spec). `start_bits` = 0 picks max(128, 4n).
///
/// # Safety
/// `family` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn szego_zeros_compute(
    family: *const c_char,
    n: usize,
    start_bits: u32,
    out: *mut *mut SzegoZeroSet,
) -> SzegoStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        *out = ptr::null_mut();
        let fam = text(family, "family")?.ok_or_else(|| invalid("family is null"))?;
        let spec = SeriesSpec::preset(fam).map_err(core_err)?;
        spec.validate().map_err(core_err)?;
        spec.check_degree(n).map_err(core_err)?;
        let d = PrecisionPolicy::for_degree(n);
        let policy = if start_bits == 0 {
            d
        } else {
            PrecisionPolicy::new(start_bits, 16 * start_bits, d.agreement_tol).map_err(core_err)?
        };
        let zs = section_zeros(&spec, n, &policy).map_err(core_err)?;
        *out = Box::into_raw(Box::new(SzegoZeroSet { inner: zs }));
        Ok(SzegoStatus::Ok)
    })
}

/// Number of zeros counted with the origin's multiplicity; 0 for null.
///
/// # Safety
/// `set` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn szego_zeros_len(set: *const SzegoZeroSet) -> usize {
    set.as_ref()
        .map_or(0, |s| s.inner.len() + s.inner.origin_multiplicity)
}

/// The k-th zero as doubles.
///
/// # Safety
/// `set` is a live handle; `re` and `im` are writable.
#[no_mangle]
pub unsafe extern "C" fn szego_zeros_get(
    set: *const SzegoZeroSet,
    k: usize,
    re: *mut f64,
    im: *mut f64,
) -> SzegoStatus {
    guard(|| {
        let s = set.as_ref().ok_or_else(|| invalid("set is null"))?;
        if re.is_null() || im.is_null() {
            return Err(invalid("re/im is null"));
        }
        let pts = s.inner.all_f64();
        let &(x, y) = pts
            .get(k)
            .ok_or_else(|| invalid(&format!("index {k} out of range ({} zeros)", pts.len())))?;
        *re = x;
        *im = y;
        Ok(SzegoStatus::Ok)
    })
}

/// CSV with header family,n,k,re,im,residual at 30 significant digits; null
/// on failure.
///
/// # Safety
/// `set` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn szego_zeros_to_csv(set: *const SzegoZeroSet) -> *mut c_char {
    match set.as_ref() {
        Some(s) => {
            set_error("");
            owned(s.inner.to_csv())
        }
        None => {
            set_error("set is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `set` is null or a handle from `szego_zeros_compute`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn szego_zeros_free(set: *mut SzegoZeroSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Samples a limit curve. `params_json` may be null for curves without
/// parameters.
///
/// # Safety
/// `kind` is a NUL-terminated string, `params_json` null or one; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn szego_curve_sample(
    kind: *const c_char,
    params_json: *const c_char,
    samples: usize,
    out: *mut *mut SzegoCurve,
) -> SzegoStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        *out = ptr::null_mut();
        let kind = text(kind, "kind")?.ok_or_else(|| invalid("kind is null"))?;
        let params = match text(params_json, "params")? {
            Some(p) => Some(
                serde_json::from_str(p)
                    .map_err(|e| (SzegoStatus::Config, format!("params: {e}")))?,
            ),
            None => None,
        };
        let spec = curve_spec(kind, params.as_ref()).map_err(core_err)?;
        let pl = sample_curve_bits(&spec, samples, DEFAULT_BITS).map_err(core_err)?;
        let points = pl.points().map(|z| z.to_f64_pair()).collect();
        *out = Box::into_raw(Box::new(SzegoCurve { inner: pl, points }));
        Ok(SzegoStatus::Ok)
    })
}

/// # Safety
/// `curve` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn szego_curve_len(curve: *const SzegoCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.points.len())
}

/// # Safety
/// `curve` is a live handle; `re` and `im` are writable.
#[no_mangle]
pub unsafe extern "C" fn szego_curve_get(
    curve: *const SzegoCurve,
    k: usize,
    re: *mut f64,
    im: *mut f64,
) -> SzegoStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| invalid("curve is null"))?;
        if re.is_null() || im.is_null() {
            return Err(invalid("re/im is null"));
        }
        let &(x, y) = c.points.get(k).ok_or_else(|| {
            invalid(&format!(
                "index {k} out of range ({} points)",
                c.points.len()
            ))
        })?;
        *re = x;
        *im = y;
        Ok(SzegoStatus::Ok)
    })
}

/// CSV with header theta,re,im,residual,piece; null on failure.
///
/// # Safety
/// `curve` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn szego_curve_to_csv(curve: *const SzegoCurve) -> *mut c_char {
    match curve.as_ref() {
        Some(c) => {
            set_error("");
            owned(c.inner.to_csv())
        }
        None => {
            set_error("curve is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `curve` is null or a handle from `szego_curve_sample`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn szego_curve_free(curve: *mut SzegoCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Runs a verification suite (buckholtz, cvw, rate, watson, annulus, lft,
/// nr, counts) with JSON parameters named like the command-line flags.
/// On `Ok` or `VerificationFailed` the JSON report is stored in
/// `*report_json`.
///
/// # Safety
/// `suite` is a NUL-terminated string, `params_json` null or one;
/// `report_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn szego_verify(
    suite: *const c_char,
    params_json: *const c_char,
    report_json: *mut *mut c_char,
) -> SzegoStatus {
    guard(|| {
        if report_json.is_null() {
            return Err(invalid("report_json is null"));
        }
        *report_json = ptr::null_mut();
        let suite = text(suite, "suite")?.ok_or_else(|| invalid("suite is null"))?;
        let params = match text(params_json, "params")? {
            Some(p) => serde_json::from_str(p)
                .map_err(|e| (SzegoStatus::Config, format!("params: {e}")))?,
            None => serde_json::Value::Null,
        };
        let report = verify_json(suite, params).map_err(core_err)?;
        *report_json = owned(report.to_json());
        if report.pass {
            Ok(SzegoStatus::Ok)
        } else {
            set_error(&format!("{suite}: criteria not met"));
            Ok(SzegoStatus::VerificationFailed)
        }
    })
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn szego_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
