//! C ABI over `udw-core`.
//!
//! Scenarios are opaque heap handles. Every fallible call returns a
//! [`UdwStatus`]; on failure `udw_last_error` holds a message for the
//! calling thread. Panics are caught at the boundary and reported as
//! `UDW_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use udw_core::config::{load_scenario_str, ConfigError};
use udw_core::elements::ElementError;
use udw_core::measures;
use udw_core::scenario::validate;
use udw_core::wightman::{wightman_eval, WightmanKernel};
use udw_core::{compute_elements, ElementSet, ModelKind, Scenario};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Nonconverged = 4,
    Nonperturbative = 5,
    Unsupported = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdwModel {
    Linear = 0,
    QuadraticReal = 1,
    QuadraticComplex = 2,
    Bilinear = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UdwComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for UdwComplex {
    fn from(z: Complex64) -> Self {
        UdwComplex { re: z.re, im: z.im }
    }
}

impl From<UdwComplex> for Complex64 {
    fn from(z: UdwComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Element values with their error estimates.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UdwElements {
    pub l_aa: f64,
    pub l_aa_err: f64,
    pub l_bb: f64,
    pub l_bb_err: f64,
    pub l_ab: UdwComplex,
    pub l_ab_err: f64,
    pub m: UdwComplex,
    pub m_err: f64,
    /// 1 if every element met its tolerance.
    pub converged: i32,
}

/// Opaque scenario handle.
pub struct UdwScenario {
    inner: Scenario,
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

fn fail(status: UdwStatus, msg: impl Into<String>) -> UdwStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> UdwStatus) -> UdwStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(UdwStatus::Panic, "internal panic"),
    }
}

fn element_status(e: &ElementError) -> UdwStatus {
    match e {
        ElementError::Invalid(_) => UdwStatus::InvalidArgument,
        ElementError::Unsupported(_) => UdwStatus::Unsupported,
        ElementError::Perturbativity(_) => UdwStatus::Nonperturbative,
    }
}

fn model_kind(model: UdwModel, n: u32) -> Option<ModelKind> {
    match model {
        UdwModel::Linear => Some(ModelKind::Linear),
        UdwModel::QuadraticReal => Some(ModelKind::QuadraticReal),
        UdwModel::QuadraticComplex => Some(ModelKind::QuadraticComplex),
        UdwModel::Bilinear if n >= 1 => Some(ModelKind::Bilinear(n)),
        UdwModel::Bilinear => None,
    }
}

/// Message for the last failed call on this thread, or NULL.
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn udw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Reference scenario with the quadratic real model. Free with `udw_scenario_free`.
#[no_mangle]
pub extern "C" fn udw_scenario_default() -> *mut UdwScenario {
    Box::into_raw(Box::new(UdwScenario {
        inner: Scenario::default(),
    }))
}

/// Reference geometry with the given model; `n` is read for bilinear only.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn udw_scenario_reference(
    model: UdwModel,
    n: u32,
    out: *mut *mut UdwScenario,
) -> UdwStatus {
    guard(|| {
        if out.is_null() {
            return fail(UdwStatus::NullPointer, "out is null");
        }
        let Some(kind) = model_kind(model, n) else {
            return fail(
                UdwStatus::InvalidArgument,
                format!("bilinear n must be at least 1, got {n}"),
            );
        };
        let handle = Box::new(UdwScenario {
            inner: Scenario::reference(kind),
        });
        *out = Box::into_raw(handle);
        UdwStatus::Ok
    })
}

/// Parse a TOML scenario.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn udw_scenario_from_toml(
    text: *const c_char,
    out: *mut *mut UdwScenario,
) -> UdwStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(UdwStatus::NullPointer, "text or out is null");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(UdwStatus::ParseError, "config is not valid UTF-8");
        };
        match load_scenario_str(s) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(UdwScenario { inner }));
                UdwStatus::Ok
            }
            Err(e @ ConfigError::Invalid(_)) => fail(UdwStatus::InvalidArgument, e.to_string()),
            Err(e) => fail(UdwStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `scenario` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn udw_scenario_free(scenario: *mut UdwScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Replace the regulator. Rejected (and left unchanged) unless positive and finite.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn udw_scenario_set_epsilon(
    scenario: *mut UdwScenario,
    epsilon: f64,
) -> UdwStatus {
    guard(|| {
        let Some(h) = scenario.as_mut() else {
            return fail(UdwStatus::NullPointer, "scenario is null");
        };
        let candidate = h.inner.with_epsilon(epsilon);
        let report = validate(&candidate);
        if !report.is_empty() {
            return fail(UdwStatus::InvalidArgument, report.to_string());
        }
        h.inner = candidate;
        UdwStatus::Ok
    })
}

/// Compute all four elements. On `UDW_STATUS_NONCONVERGED` the values are still written.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn udw_compute_elements(
    scenario: *const UdwScenario,
    out: *mut UdwElements,
) -> UdwStatus {
    guard(|| {
        let (Some(h), false) = (scenario.as_ref(), out.is_null()) else {
            return fail(UdwStatus::NullPointer, "scenario or out is null");
        };
        match compute_elements(&h.inner) {
            Ok(set) => {
                *out = UdwElements {
                    l_aa: set.l_aa(),
                    l_aa_err: set.l_aa.err,
                    l_bb: set.l_bb(),
                    l_bb_err: set.l_bb.err,
                    l_ab: set.l_ab().into(),
                    l_ab_err: set.l_ab.err,
                    m: set.m().into(),
                    m_err: set.m.err,
                    converged: i32::from(set.converged()),
                };
                if set.converged() {
                    UdwStatus::Ok
                } else {
                    fail(
                        UdwStatus::Nonconverged,
                        "quadrature did not reach tolerance",
                    )
                }
            }
            Err(e) => fail(element_status(&e), e.to_string()),
        }
    })
}

/// W_ε(Δt, r).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn udw_wightman_eval(
    dt: f64,
    r: f64,
    epsilon: f64,
    out: *mut UdwComplex,
) -> UdwStatus {
    guard(|| {
        if out.is_null() {
            return fail(UdwStatus::NullPointer, "out is null");
        }
        let value = WightmanKernel::new(epsilon).and_then(|k| wightman_eval(&k, dt, r));
        match value {
            Ok(w) => {
                *out = w.into();
                UdwStatus::Ok
            }
            Err(e) => fail(UdwStatus::InvalidArgument, e.to_string()),
        }
    })
}

unsafe fn measure(
    elements: *const UdwElements,
    out: *mut f64,
    f: fn(&ElementSet) -> Result<f64, ElementError>,
) -> UdwStatus {
    guard(|| {
        let (Some(e), false) = (elements.as_ref(), out.is_null()) else {
            return fail(UdwStatus::NullPointer, "elements or out is null");
        };
        let set = ElementSet::from_values(e.l_aa, e.l_bb, e.l_ab.into(), e.m.into());
        match f(&set) {
            Ok(v) => {
                *out = v;
                UdwStatus::Ok
            }
            Err(err) => fail(element_status(&err), err.to_string()),
        }
    })
}

/// Closed-form negativity of the assembled state.
///
/// # Safety
/// `elements` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn udw_negativity(elements: *const UdwElements, out: *mut f64) -> UdwStatus {
    measure(elements, out, measures::negativity)
}

/// Closed-form mutual information of the assembled state.
///
/// # Safety
/// `elements` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn udw_mutual_information(
    elements: *const UdwElements,
    out: *mut f64,
) -> UdwStatus {
    measure(elements, out, measures::mutual_information)
}
