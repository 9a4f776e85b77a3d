//! C ABI for `molopt`.
//!
//! Parameter sets live behind an opaque [`MoloptParams`] handle created from
//! a JSON document and released with [`molopt_params_free`]. Every other
//! function returns a [`MoloptStatus`] and writes results through out
//! pointers. On failure the message is available from
//! [`molopt_last_error`] on the same thread.
//!
//! Frequencies are ordinary frequencies in THz, as in the Rust API.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use molopt::analysis::{bandwidth, AnalysisError};
use molopt::cli::parse_config;
use molopt::model::{DetuningMode, SystemParams, ValidatedParams};
use molopt::operating_point::OperatingPoint;
use molopt::response::{optimal_coupling, solve_response, ResponseError};
use molopt::stability::{stability_report, RouthVerdict};
use molopt::steady_state::{default_steady_state, SteadyStateError};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoloptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    InvalidParams = 4,
    NotApplicable = 5,
    Diverges = 6,
    PoleInBand = 7,
    NoPeak = 8,
    NumericFailure = 9,
    Panic = 10,
}

/// Opaque parameter set.
pub struct MoloptParams {
    inner: ValidatedParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MoloptSteadyState {
    pub delta_eff: f64,
    pub delta0: f64,
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub c_re: f64,
    pub c_im: f64,
    pub ga_re: f64,
    pub ga_im: f64,
    pub x_b: f64,
    pub branch_id: u32,
    pub converged: bool,
    pub iterations: u32,
    pub max_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MoloptStability {
    pub stable: bool,
    /// Largest eigenvalue real part, THz.
    pub spectral_abscissa: f64,
    /// 0 stable, 1 unstable, 2 borderline.
    pub routh: i32,
    pub methods_agree: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(MoloptStatus, String);

impl From<SteadyStateError> for Failure {
    fn from(e: SteadyStateError) -> Self {
        let code = match e {
            SteadyStateError::PrescribedCoupling | SteadyStateError::NeedsBareDetuning => MoloptStatus::NotApplicable,
            _ => MoloptStatus::NumericFailure,
        };
        Failure(code, e.to_string())
    }
}

impl From<ResponseError> for Failure {
    fn from(e: ResponseError) -> Self {
        let code = match e {
            ResponseError::Diverges { .. } => MoloptStatus::Diverges,
            ResponseError::ZeroSignal => MoloptStatus::InvalidParams,
            ResponseError::Numerics(_) => MoloptStatus::NumericFailure,
        };
        Failure(code, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::PoleInBand { .. } => MoloptStatus::PoleInBand,
            AnalysisError::NoPeak | AnalysisError::HalfMaxNotBracketed { .. } => MoloptStatus::NoPeak,
            AnalysisError::InvalidParams(_) => MoloptStatus::InvalidParams,
            _ => MoloptStatus::NumericFailure,
        };
        Failure(code, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MoloptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MoloptStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            MoloptStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(MoloptStatus::NullPointer, "null pointer argument".into())
}

unsafe fn params_ref<'a>(p: *const MoloptParams) -> Result<&'a MoloptParams, Failure> {
    p.as_ref().ok_or_else(null)
}

fn validated(p: SystemParams) -> Result<ValidatedParams, Failure> {
    p.validate().map_err(|v| {
        let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
        Failure(MoloptStatus::InvalidParams, msgs.join("; "))
    })
}

/// Operating point of the handle, or with `|𝒢_a| = ga_thz` prescribed when
/// `ga_thz` is not negative.
fn operating_point(p: &MoloptParams, ga_thz: f64) -> Result<OperatingPoint, Failure> {
    if ga_thz.is_nan() {
        return Err(Failure(MoloptStatus::InvalidParams, "ga_thz is NaN".into()));
    }
    if ga_thz < 0.0 {
        return Ok(OperatingPoint::from_params(&p.inner)?);
    }
    let delta = match p.inner.detuning_mode.effective_delta() {
        Some(d) => d,
        None => default_steady_state(&p.inner)?.delta_eff,
    };
    let mut sp = p.inner.params().clone();
    sp.detuning_mode = DetuningMode::PrescribedGa { ga_thz, delta_thz: delta };
    Ok(OperatingPoint::from_params(&validated(sp)?)?)
}

/// Parses a JSON parameter document into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn molopt_params_from_json(json: *const c_char, out: *mut *mut MoloptParams) -> MoloptStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(MoloptStatus::InvalidUtf8, e.to_string()))?;
        let p = parse_config(text).map_err(|e| Failure(MoloptStatus::ConfigError, e.to_string()))?;
        let inner = validated(p)?;
        *out = Box::into_raw(Box::new(MoloptParams { inner }));
        Ok(())
    })
}

/// Handle for the built-in reference parameter set.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn molopt_params_reference(out: *mut *mut MoloptParams) -> MoloptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let inner = validated(SystemParams::reference())?;
        *out = Box::into_raw(Box::new(MoloptParams { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `params` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn molopt_params_free(params: *mut MoloptParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Default steady state of the handle's parameters.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn molopt_steady_state(params: *const MoloptParams, out: *mut MoloptSteadyState) -> MoloptStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(null)?;
        let s = default_steady_state(&p.inner)?;
        *out = MoloptSteadyState {
            delta_eff: s.delta_eff,
            delta0: s.delta0,
            a_re: s.a_ss.re,
            a_im: s.a_ss.im,
            b_re: s.b_ss.re,
            b_im: s.b_ss.im,
            c_re: s.c_ss.re,
            c_im: s.c_ss.im,
            ga_re: s.cal_ga.re,
            ga_im: s.cal_ga.im,
            x_b: s.x_b,
            branch_id: s.branch_id as u32,
            converged: s.converged,
            iterations: s.iterations as u32,
            max_residual: s.max_residual(),
        };
        Ok(())
    })
}

/// Conversion efficiency `T_ac` at probe frequency `omega_ir_thz`.
/// A negative `ga_thz` uses the handle's own coupling.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn molopt_tac(
    params: *const MoloptParams,
    ga_thz: f64,
    omega_ir_thz: f64,
    out: *mut f64,
) -> MoloptStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(null)?;
        let op = operating_point(p, ga_thz)?;
        *out = solve_response(&op, omega_ir_thz)?.tac;
        Ok(())
    })
}

/// Stability verdict. A negative `ga_thz` uses the handle's own coupling.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn molopt_stability(
    params: *const MoloptParams,
    ga_thz: f64,
    out: *mut MoloptStability,
) -> MoloptStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(null)?;
        let op = operating_point(p, ga_thz)?;
        let s = stability_report(&op).map_err(|e| Failure(MoloptStatus::NumericFailure, e.to_string()))?;
        *out = MoloptStability {
            stable: s.is_stable(),
            spectral_abscissa: s.spectral_abscissa,
            routh: match s.routh {
                RouthVerdict::Stable => 0,
                RouthVerdict::Unstable => 1,
                RouthVerdict::Borderline => 2,
            },
            methods_agree: s.methods_agree,
        };
        Ok(())
    })
}

/// Gain bandwidth (FWHM) in THz. A negative `ga_thz` uses the handle's own coupling.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn molopt_bandwidth(params: *const MoloptParams, ga_thz: f64, out: *mut f64) -> MoloptStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(null)?;
        let op = operating_point(p, ga_thz)?;
        *out = bandwidth(&op)?.width;
        Ok(())
    })
}

/// Closed-form optimal coupling `|𝒢_a^(*)|` in THz.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn molopt_optimal_coupling(params: *const MoloptParams, out: *mut f64) -> MoloptStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(null)?;
        // The formula only needs Δ and the rates; any coupling value will do.
        let op = operating_point(p, 0.0)?;
        *out = optimal_coupling(&op);
        Ok(())
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn molopt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn molopt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
