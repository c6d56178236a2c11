//! C interface to `mveuler`.
//!
//! Every entry point returns an [`MveStatus`]. On anything other than
//! `MVE_STATUS_OK`, [`mve_last_error`] describes the failure; the message
//! belongs to the calling thread and stays valid until its next call into
//! this library. Strings handed out through `out` parameters are owned by
//! the caller and must be released with [`mve_string_free`]; formula
//! handles with [`mve_formula_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mveuler::axioms::{self, HarnessConfig};
use mveuler::complex::MAX_KUHN_DIM;
use mveuler::formula::{parse, Formula};
use mveuler::linearize::{linearizing_triangulation, restrict_to_theory, LinearizeError};
use mveuler::numeric::{format_rational, parse_point};
use mveuler::valuation::{evaluate_with, Method, MethodChoice, Options, ValuationError};

/// Outcome of a call; the values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MveStatus {
    Ok = 0,
    /// A checked property failed (axiom harness, or the methods disagree).
    PropertyFailure = 1,
    /// Unparsable formula or point, bad dimension or method, invalid UTF-8.
    InvalidInput = 2,
    /// A blow-up or reduction cap was hit.
    ResourceCap = 3,
    /// The theory has no models; any report produced carries `E = 0`.
    InconsistentTheory = 4,
    NullPointer = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Values accepted by the `method` parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MveMethod {
    Geometric = 0,
    Recursive = 1,
    Both = 2,
    /// Both methods up to 64 distinct hats, geometric beyond.
    Auto = 3,
}

/// Opaque parsed formula.
pub struct MveFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail {
    status: MveStatus,
    message: String,
}

impl Fail {
    fn new(status: MveStatus, message: impl Into<String>) -> Self {
        Fail { status, message: message.into() }
    }
}

impl From<ValuationError> for Fail {
    fn from(e: ValuationError) -> Self {
        let status = if e.is_resource_cap() {
            MveStatus::ResourceCap
        } else {
            match &e {
                ValuationError::Linearize(LinearizeError::DimensionTooSmall { .. }) => MveStatus::InvalidInput,
                ValuationError::InconsistentTheory { .. } => MveStatus::InconsistentTheory,
                _ => MveStatus::PropertyFailure,
            }
        };
        Fail::new(status, e.to_string())
    }
}

impl From<LinearizeError> for Fail {
    fn from(e: LinearizeError) -> Self {
        ValuationError::from(e).into()
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("NUL bytes were replaced"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> MveStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => (MveStatus::Ok, None),
        Ok(Err(f)) => (f.status, Some(f.message)),
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (MveStatus::Internal, Some(text))
        }
    };
    set_last_error(message);
    status
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::new(MveStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::new(MveStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn formula<'a>(p: *const MveFormula, what: &str) -> Result<&'a Formula, Fail> {
    p.as_ref().map(|f| &f.0).ok_or_else(|| Fail::new(MveStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::new(MveStatus::NullPointer, "output pointer is null"));
    }
    *out = CString::new(s).map_err(|e| Fail::new(MveStatus::Internal, e.to_string()))?.into_raw();
    Ok(())
}

fn method_choice(method: c_int) -> Result<MethodChoice, Fail> {
    Ok(match method {
        0 => MethodChoice::Fixed(Method::Geometric),
        1 => MethodChoice::Fixed(Method::Recursive),
        2 => MethodChoice::Fixed(Method::Both),
        3 => MethodChoice::default(),
        m => return Err(Fail::new(MveStatus::InvalidInput, format!("unknown method {m}"))),
    })
}

/// `dim = 0` means the largest variable index occurring in `fs`, at least 1.
fn ambient_dim(dim: usize, fs: &[&Formula]) -> Result<usize, Fail> {
    let needed = fs.iter().map(|f| f.max_var()).max().unwrap_or(0);
    let d = if dim == 0 { needed.max(1) } else { dim };
    if d < needed {
        return Err(Fail::new(MveStatus::InvalidInput, format!("dimension {d} is smaller than x{needed}")));
    }
    if d > MAX_KUHN_DIM {
        return Err(Fail::new(MveStatus::InvalidInput, format!("dimension must lie in 1..={MAX_KUHN_DIM}, got {d}")));
    }
    Ok(d)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mve_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null.
#[no_mangle]
pub extern "C" fn mve_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mve_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `text` into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mve_formula_parse(text: *const c_char, out: *mut *mut MveFormula) -> MveStatus {
    guard(|| {
        let t = c_str(text, "formula text")?;
        if out.is_null() {
            return Err(Fail::new(MveStatus::NullPointer, "output pointer is null"));
        }
        let f = parse(t.trim()).map_err(|e| Fail::new(MveStatus::InvalidInput, e.to_string()))?;
        *out = Box::into_raw(Box::new(MveFormula(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from [`mve_formula_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mve_formula_free(f: *mut MveFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Canonical text of a formula.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mve_formula_to_string(f: *const MveFormula, out: *mut *mut c_char) -> MveStatus {
    guard(|| put_string(out, formula(f, "formula")?.to_string()))
}

/// Value of `f` at `point`, given as comma-separated exact fractions such
/// as `"3/4,1/2"`, written to `*out` as a reduced fraction.
///
/// # Safety
/// `f` must be a live handle, `point` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mve_formula_eval(f: *const MveFormula, point: *const c_char, out: *mut *mut c_char) -> MveStatus {
    guard(|| {
        let f = formula(f, "formula")?;
        let p = parse_point(c_str(point, "point")?).map_err(|e| Fail::new(MveStatus::InvalidInput, e.to_string()))?;
        let v = f.evaluate(&p).map_err(|e| Fail::new(MveStatus::InvalidInput, e.to_string()))?;
        put_string(out, format_rational(&v))
    })
}

unsafe fn report(
    phi: *const MveFormula,
    theory: *const MveFormula,
    dim: usize,
    method: c_int,
) -> Result<(MveStatus, mveuler::ValuationReport), Fail> {
    let phi = formula(phi, "formula")?;
    let theory = if theory.is_null() { None } else { Some(formula(theory, "theory")?) };
    let mut fs = vec![phi];
    fs.extend(theory);
    let d = ambient_dim(dim, &fs)?;
    match evaluate_with(phi, theory, d, method_choice(method)?, &Options::default(), false) {
        Ok(ev) => Ok((MveStatus::Ok, ev.report)),
        Err(ValuationError::InconsistentTheory { report }) => Ok((MveStatus::InconsistentTheory, *report)),
        Err(e) => Err(e.into()),
    }
}

/// `E(phi)` in the algebra presented by `theory` (null for the free
/// algebra) over `[0,1]^dim`; `dim = 0` infers it from the formulas.
/// `method` is an [`MveMethod`] value. An inconsistent theory writes 0 and
/// returns `MVE_STATUS_INCONSISTENT_THEORY`.
///
/// # Safety
/// `phi` must be a live handle, `theory` null or a live handle, `out_e`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mve_euler(
    phi: *const MveFormula,
    theory: *const MveFormula,
    dim: usize,
    method: c_int,
    out_e: *mut i64,
) -> MveStatus {
    guard(|| {
        if out_e.is_null() {
            return Err(Fail::new(MveStatus::NullPointer, "output pointer is null"));
        }
        let (status, r) = report(phi, theory, dim, method)?;
        *out_e = r.e;
        match status {
            MveStatus::Ok => Ok(()),
            s => Err(Fail::new(s, "the theory has no models; E = 0 by convention")),
        }
    })
}

/// As [`mve_euler`], writing the full valuation report as JSON to `*out`.
/// The report is also written for an inconsistent theory.
///
/// # Safety
/// As for [`mve_euler`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mve_report_json(
    phi: *const MveFormula,
    theory: *const MveFormula,
    dim: usize,
    method: c_int,
    out: *mut *mut c_char,
) -> MveStatus {
    guard(|| {
        let (status, r) = report(phi, theory, dim, method)?;
        let json = serde_json::to_string(&r).map_err(|e| Fail::new(MveStatus::Internal, e.to_string()))?;
        put_string(out, json)?;
        match status {
            MveStatus::Ok => Ok(()),
            s => Err(Fail::new(s, "the theory has no models; E = 0 by convention")),
        }
    })
}

/// JSON of the triangulation linearizing `phi` (restricted to `oneset(theory)`
/// when `theory` is not null).
///
/// # Safety
/// As for [`mve_report_json`].
#[no_mangle]
pub unsafe extern "C" fn mve_triangulation_json(
    phi: *const MveFormula,
    theory: *const MveFormula,
    dim: usize,
    out: *mut *mut c_char,
) -> MveStatus {
    guard(|| {
        let phi = formula(phi, "formula")?;
        let theory = if theory.is_null() { None } else { Some(formula(theory, "theory")?) };
        let mut fs = vec![phi.clone()];
        fs.extend(theory.cloned());
        let d = ambient_dim(dim, &fs.iter().collect::<Vec<_>>())?;
        let lin = linearizing_triangulation(&fs, d, Options::default().blowup_cap)?;
        let t = if theory.is_some() {
            match restrict_to_theory(&lin, 1) {
                Ok(r) => r.polyhedron.triangulation,
                Err(LinearizeError::InconsistentTheory) => {
                    return Err(Fail::new(MveStatus::InconsistentTheory, "the theory has no models"))
                }
                Err(e) => return Err(e.into()),
            }
        } else {
            lin.triangulation
        };
        let json = serde_json::to_string(&t).map_err(|e| Fail::new(MveStatus::Internal, e.to_string()))?;
        put_string(out, json)
    })
}

/// Runs the seeded axiom harness and writes its JSON summary to `*out`.
/// Returns `MVE_STATUS_PROPERTY_FAILURE` if any trial fails.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mve_check_axioms(
    trials: usize,
    vars: usize,
    max_depth: usize,
    max_size: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> MveStatus {
    guard(|| {
        if trials == 0 || !(1..=MAX_KUHN_DIM).contains(&vars) || max_size == 0 {
            return Err(Fail::new(MveStatus::InvalidInput, "need trials >= 1, vars in 1..=6 and size >= 1"));
        }
        let config = HarnessConfig { trials, vars, max_depth, max_size, seed, options: Options::default() };
        let summary = axioms::run(&config);
        let json = serde_json::to_string(&summary).map_err(|e| Fail::new(MveStatus::Internal, e.to_string()))?;
        put_string(out, json)?;
        if summary.all_passed() {
            Ok(())
        } else {
            Err(Fail::new(MveStatus::PropertyFailure, format!("{} of {trials} trials failed", summary.failed)))
        }
    })
}
