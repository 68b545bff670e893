//! C ABI over `polya_mst`. Objects are opaque handles released by their
//! `_free` function; every fallible call returns a [`PolyaStatus`] and leaves
//! a message readable through [`polya_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polya_mst::models::{build_model, ModelBundle, ModelKind};
use polya_mst::ratlinalg::{format_rational, to_f64, Scalar};
use polya_mst::simulate::{run_mc, McConfig, SimMode};
use polya_mst::urn::{asymptotics_integral, functional_law, spectral, AsymptoticLaw};
use polya_mst::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyaStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Bad model name, arity, functional or other input.
    InvalidArgument = 2,
    /// A size cap was exceeded.
    Size = 3,
    /// A ledger entry did not reproduce.
    Verification = 4,
    /// The urn is not in the normal regime, so there is no covariance.
    NotNormal = 5,
    /// The value exists only in floating point.
    NotExact = 6,
    /// A string argument was not UTF-8.
    Utf8 = 7,
    /// Internal failure, including caught panics.
    Internal = 8,
}

/// An urn model together with its named functionals.
pub struct PolyaModel {
    bundle: ModelBundle,
}

/// The limit law `(μ, Σ)` of a model.
pub struct PolyaLaw {
    bundle: ModelBundle,
    law: AsymptoticLaw,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PolyaStatus {
    match e {
        Error::Size(_) => PolyaStatus::Size,
        Error::Verification(_) => PolyaStatus::Verification,
        Error::Regime { .. } => PolyaStatus::NotNormal,
        Error::Linalg(_) | Error::Io(_) | Error::Json(_) => PolyaStatus::Internal,
        _ => PolyaStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (PolyaStatus, String)>) -> PolyaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PolyaStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("panic inside polya_mst");
            PolyaStatus::Internal
        }
    }
}

fn lib<T>(r: polya_mst::Result<T>) -> Result<T, (PolyaStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (PolyaStatus, String) {
    (PolyaStatus::NullPointer, "null pointer argument".into())
}

unsafe fn string<'a>(p: *const c_char) -> Result<&'a str, (PolyaStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (PolyaStatus::Utf8, e.to_string()))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn polya_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds `kind` ("protected", "nodes", "leaves" or "one-protected") at arity `m`.
///
/// # Safety
/// `kind` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polya_model_new(
    kind: *const c_char,
    m: u32,
    out: *mut *mut PolyaModel,
) -> PolyaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let kind: ModelKind = lib(string(kind)?.parse())?;
        let bundle = lib(build_model(kind, m as usize))?;
        *out = Box::into_raw(Box::new(PolyaModel { bundle }));
        Ok(())
    })
}

/// Number of ball types, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polya_model_types(model: *const PolyaModel) -> usize {
    model.as_ref().map_or(0, |m| m.bundle.q())
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polya_model_free(model: *mut PolyaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Computes the limit law. Fails with `NotNormal` outside the normal regime.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polya_law_new(
    model: *const PolyaModel,
    out: *mut *mut PolyaLaw,
) -> PolyaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let model = model.as_ref().ok_or_else(null)?;
        let sd = lib(spectral(&model.bundle.spec))?;
        let law = lib(asymptotics_integral(&model.bundle.spec, &sd))?;
        *out = Box::into_raw(Box::new(PolyaLaw {
            bundle: model.bundle.clone(),
            law,
        }));
        Ok(())
    })
}

/// # Safety
/// `law` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polya_law_free(law: *mut PolyaLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

unsafe fn functional(
    law: *const PolyaLaw,
    name: *const c_char,
) -> Result<polya_mst::urn::FunctionalLaw, (PolyaStatus, String)> {
    let law = law.as_ref().ok_or_else(null)?;
    let c = lib(polya_mst::simulate::urn_functional(
        &law.bundle,
        string(name)?,
    ))?;
    lib(functional_law(&law.law, c))
}

/// Per-key mean and variance of the named functional, as doubles.
///
/// # Safety
/// `law` must be a live handle, `name` a NUL-terminated string, and
/// `mean`, `variance` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polya_law_functional(
    law: *const PolyaLaw,
    name: *const c_char,
    mean: *mut f64,
    variance: *mut f64,
) -> PolyaStatus {
    guard(|| {
        if mean.is_null() || variance.is_null() {
            return Err(null());
        }
        let fl = functional(law, name)?;
        *mean = to_f64(&fl.mean);
        *variance = fl.variance.to_f64();
        Ok(())
    })
}

/// Exact per-key mean and variance as `"p/q"` strings, released with
/// [`polya_string_free`]. Fails with `NotExact` when the covariance was
/// computed in floating point.
///
/// # Safety
/// As for [`polya_law_functional`]; `mean` and `variance` receive owned strings.
#[no_mangle]
pub unsafe extern "C" fn polya_law_functional_exact(
    law: *const PolyaLaw,
    name: *const c_char,
    mean: *mut *mut c_char,
    variance: *mut *mut c_char,
) -> PolyaStatus {
    guard(|| {
        if mean.is_null() || variance.is_null() {
            return Err(null());
        }
        *mean = ptr::null_mut();
        *variance = ptr::null_mut();
        let fl = functional(law, name)?;
        let Scalar::Exact(v) = &fl.variance else {
            return Err((
                PolyaStatus::NotExact,
                "covariance is only available in floating point".into(),
            ));
        };
        *mean = owned(format_rational(&fl.mean));
        *variance = owned(format_rational(v));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polya_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Monte Carlo over random `m`-ary search trees with `n` keys: sample mean
/// and unbiased variance of `stat` ("two_protected", "one_protected",
/// "leaves" or "internal") over `trials` seeded trials.
///
/// # Safety
/// `stat` must be a NUL-terminated string and `mean`, `variance` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polya_simulate(
    m: u32,
    n: u64,
    trials: u64,
    seed: u64,
    stat: *const c_char,
    mean: *mut f64,
    variance: *mut f64,
) -> PolyaStatus {
    guard(|| {
        if mean.is_null() || variance.is_null() {
            return Err(null());
        }
        let cfg = McConfig {
            m: m as usize,
            n,
            trials,
            seed,
            statistics: vec![string(stat)?.to_string()],
            keep_samples: false,
        };
        let s = lib(run_mc(&SimMode::Tree, &cfg))?;
        *mean = s[0].mean();
        *variance = s[0].variance();
        Ok(())
    })
}

/// Runs the exact-value ledger. Returns `Verification` if any entry fails.
///
/// # Safety
/// `passed` and `total` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polya_verify(passed: *mut usize, total: *mut usize) -> PolyaStatus {
    guard(|| {
        if passed.is_null() || total.is_null() {
            return Err(null());
        }
        let r = lib(polya_mst::verify::run_ledger())?;
        *total = r.entries.len();
        *passed = r.entries.len() - r.failures().count();
        if r.passed() {
            Ok(())
        } else {
            Err((
                PolyaStatus::Verification,
                format!("{} ledger entries failed", r.failures().count()),
            ))
        }
    })
}
