//! Physical parameter set and unit conventions.
//!
//! Every frequency-like quantity is an ordinary frequency `ν = ω/2π`. Decay
//! rates, detunings, pump amplitude and the linearized couplings are in THz;
//! the single-molecule couplings `g_a`, `g_c` and the signal amplitude
//! `eps_ir` are in GHz, the way they are usually quoted. All response
//! formulas are homogeneous in frequency, so dimensionless results (`T_ac`)
//! are identical to an angular-frequency evaluation and frequency-valued
//! results (stability margins, bandwidths, couplings) are simply `ω/2π`.

use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// GHz to THz.
pub const GHZ: f64 = 1e-3;

/// Units used throughout the crate.
pub const UNIT_NOTE: &str = "All internal computation uses ordinary frequencies nu = omega/2pi. \
Rates, detunings, eps_p and linearized couplings are THz; g_a, g_c and eps_ir are GHz. \
T_ac is dimensionless and unchanged by a common rescaling of every frequency.";

/// Ratio `eps_ir / eps_p` above which the linearization is flagged.
pub const LINEARIZATION_WARN_RATIO: f64 = 0.01;

/// How the pump detuning is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetuningMode {
    /// Effective detuning `Δ` given; the bare detuning follows from the steady state.
    FixedDelta { delta_thz: f64 },
    /// Bare detuning `Δ0` given; `Δ` is found self-consistently.
    #[serde(rename = "fixed_delta0")]
    FixedDelta0 { delta0_thz: f64 },
    /// Linearized coupling magnitude `|𝒢_a|` and `Δ` given directly; no steady state.
    PrescribedGa { ga_thz: f64, delta_thz: f64 },
}

impl DetuningMode {
    /// The effective detuning if the mode fixes it.
    pub fn effective_delta(&self) -> Option<f64> {
        match *self {
            DetuningMode::FixedDelta { delta_thz } => Some(delta_thz),
            DetuningMode::PrescribedGa { delta_thz, .. } => Some(delta_thz),
            DetuningMode::FixedDelta0 { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Molecular vibrational frequency, THz.
    pub nu_b: f64,
    /// IR mode frequency, THz.
    pub nu_c: f64,
    /// VIS mode decay rate, THz.
    pub kappa_a: f64,
    /// IR mode decay rate, THz.
    pub kappa_c: f64,
    /// Collective vibrational decay rate, THz.
    #[serde(rename = "gamma_B")]
    pub gamma_b: f64,
    /// Single-molecule optomechanical coupling, GHz.
    pub g_a: f64,
    /// Single-molecule bilinear coupling, GHz.
    pub g_c: f64,
    /// Number of molecules. Physical values are integers; sweeps treat it as continuous.
    pub n_molecules: f64,
    /// Pump amplitude, THz.
    pub eps_p: f64,
    /// IR signal amplitude, GHz.
    pub eps_ir: f64,
    pub detuning_mode: DetuningMode,
    /// Pump frequency, THz. Only used to report lab-frame output frequencies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_p: Option<f64>,
}

impl SystemParams {
    /// Fully resonant operating point of the reference amplification scheme:
    /// `ν_b = ν_c = 30 THz`, blue-detuned pump at `Δ = -ν_b`, `N = 10^7`.
    pub fn reference() -> Self {
        Self {
            nu_b: 30.0,
            nu_c: 30.0,
            kappa_a: 30.0,
            kappa_c: 0.5,
            gamma_b: 0.16,
            g_a: 0.08,
            g_c: 0.1,
            n_molecules: 1e7,
            eps_p: 500.0,
            eps_ir: 1e-3,
            detuning_mode: DetuningMode::FixedDelta { delta_thz: -30.0 },
            nu_p: None,
        }
    }

    /// Same parameters with `|𝒢_a|` prescribed at the current effective detuning.
    pub fn with_prescribed_ga(&self, ga_thz: f64, delta_thz: f64) -> Self {
        Self {
            detuning_mode: DetuningMode::PrescribedGa { ga_thz, delta_thz },
            ..self.clone()
        }
    }

    pub fn validate(self) -> Result<ValidatedParams, Vec<ParamViolation>> {
        validate(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum ParamViolation {
    #[error("{0} must be a finite number")]
    NonFinite(&'static str),
    #[error("decay rate {0} must be positive")]
    NonPositiveDecayRate(&'static str),
    #[error("frequency {0} must be positive")]
    NonPositiveFrequency(&'static str),
    #[error("n_molecules must be at least 1")]
    TooFewMolecules,
    #[error("amplitude {0} must be nonnegative")]
    NegativeAmplitude(&'static str),
    #[error("coupling {0} must be nonnegative")]
    NegativeCoupling(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ParamWarning {
    /// The signal is not small against the pump; the linear response may be inaccurate.
    LinearizationQuestionable { ratio: f64 },
}

impl std::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamWarning::LinearizationQuestionable { ratio } => write!(
                f,
                "eps_ir/eps_p = {ratio:e} exceeds {LINEARIZATION_WARN_RATIO}; linearization may not hold"
            ),
        }
    }
}

/// Parameters that passed [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedParams {
    params: SystemParams,
    warnings: Vec<ParamWarning>,
}

impl ValidatedParams {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn warnings(&self) -> &[ParamWarning] {
        &self.warnings
    }

    pub fn into_inner(self) -> SystemParams {
        self.params
    }

    pub fn couplings(&self) -> CollectiveCouplings {
        collective_couplings(&self.params)
    }

    /// Signal amplitude in THz.
    pub fn eps_ir_thz(&self) -> f64 {
        self.params.eps_ir * GHZ
    }
}

impl Deref for ValidatedParams {
    type Target = SystemParams;

    fn deref(&self) -> &SystemParams {
        &self.params
    }
}

pub fn validate(p: SystemParams) -> Result<ValidatedParams, Vec<ParamViolation>> {
    use ParamViolation::*;
    let mut errs = Vec::new();

    let mut finite = |name: &'static str, v: f64| {
        if v.is_finite() {
            true
        } else {
            errs.push(NonFinite(name));
            false
        }
    };
    let checks = [
        ("nu_b", p.nu_b),
        ("nu_c", p.nu_c),
        ("kappa_a", p.kappa_a),
        ("kappa_c", p.kappa_c),
        ("gamma_B", p.gamma_b),
        ("g_a", p.g_a),
        ("g_c", p.g_c),
        ("n_molecules", p.n_molecules),
        ("eps_p", p.eps_p),
        ("eps_ir", p.eps_ir),
    ];
    let all_finite = checks.iter().fold(true, |ok, &(n, v)| finite(n, v) && ok);
    let mode_finite = match p.detuning_mode {
        DetuningMode::FixedDelta { delta_thz } => finite("delta_thz", delta_thz),
        DetuningMode::FixedDelta0 { delta0_thz } => finite("delta0_thz", delta0_thz),
        DetuningMode::PrescribedGa { ga_thz, delta_thz } => {
            finite("ga_thz", ga_thz) & finite("delta_thz", delta_thz)
        }
    };
    if let Some(nu_p) = p.nu_p {
        finite("nu_p", nu_p);
    }

    if all_finite {
        for (name, v) in [("kappa_a", p.kappa_a), ("kappa_c", p.kappa_c), ("gamma_B", p.gamma_b)] {
            if v <= 0.0 {
                errs.push(NonPositiveDecayRate(name));
            }
        }
        for (name, v) in [("nu_b", p.nu_b), ("nu_c", p.nu_c)] {
            if v <= 0.0 {
                errs.push(NonPositiveFrequency(name));
            }
        }
        if p.n_molecules < 1.0 {
            errs.push(TooFewMolecules);
        }
        for (name, v) in [("eps_p", p.eps_p), ("eps_ir", p.eps_ir)] {
            if v < 0.0 {
                errs.push(NegativeAmplitude(name));
            }
        }
        for (name, v) in [("g_a", p.g_a), ("g_c", p.g_c)] {
            if v < 0.0 {
                errs.push(NegativeCoupling(name));
            }
        }
    }
    if mode_finite {
        if let DetuningMode::PrescribedGa { ga_thz, .. } = p.detuning_mode {
            if ga_thz < 0.0 {
                errs.push(NegativeCoupling("ga_thz"));
            }
        }
    }

    if !errs.is_empty() {
        return Err(errs);
    }

    let mut warnings = Vec::new();
    let ratio = if p.eps_p > 0.0 {
        p.eps_ir * GHZ / p.eps_p
    } else if p.eps_ir > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    if ratio > LINEARIZATION_WARN_RATIO {
        log::warn!("eps_ir/eps_p = {ratio:e}: linearized response may be inaccurate");
        warnings.push(ParamWarning::LinearizationQuestionable { ratio });
    }
    Ok(ValidatedParams { params: p, warnings })
}

/// Collective couplings `G = g √N`, in THz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveCouplings {
    pub g_a: f64,
    pub g_c: f64,
}

pub fn collective_couplings(p: &SystemParams) -> CollectiveCouplings {
    let root_n = p.n_molecules.sqrt();
    CollectiveCouplings {
        g_a: p.g_a * GHZ * root_n,
        g_c: p.g_c * GHZ * root_n,
    }
}
