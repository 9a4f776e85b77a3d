use num_complex::Complex64;
use serde::Serialize;

use crate::model::{DetuningMode, ValidatedParams};
use crate::steady_state::{default_steady_state, SteadyState, SteadyStateError};

/// Everything the linearized fluctuation equations need: effective detuning,
/// pump-enhanced coupling, bare couplings and rates. All frequencies in THz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub delta: f64,
    pub cal_ga: Complex64,
    /// Collective bilinear coupling `G_c`.
    pub g_c: f64,
    pub kappa_a: f64,
    pub kappa_c: f64,
    pub gamma_b: f64,
    pub nu_b: f64,
    pub nu_c: f64,
    /// Signal amplitude, THz.
    pub eps_ir: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadyState>,
}

impl OperatingPoint {
    /// Resolves the detuning mode. A prescribed `|𝒢_a|` is taken with zero phase.
    pub fn from_params(p: &ValidatedParams) -> Result<Self, SteadyStateError> {
        let g_c = p.couplings().g_c;
        let (delta, cal_ga, steady) = match p.detuning_mode {
            DetuningMode::PrescribedGa { ga_thz, delta_thz } => {
                (delta_thz, Complex64::new(ga_thz, 0.0), None)
            }
            _ => {
                let s = default_steady_state(p)?;
                (s.delta_eff, s.cal_ga, Some(s))
            }
        };
        Ok(Self {
            delta,
            cal_ga,
            g_c,
            kappa_a: p.kappa_a,
            kappa_c: p.kappa_c,
            gamma_b: p.gamma_b,
            nu_b: p.nu_b,
            nu_c: p.nu_c,
            eps_ir: p.eps_ir_thz(),
            steady,
        })
    }

    pub fn from_steady_state(p: &ValidatedParams, s: SteadyState) -> Self {
        Self {
            delta: s.delta_eff,
            cal_ga: s.cal_ga,
            g_c: p.couplings().g_c,
            kappa_a: p.kappa_a,
            kappa_c: p.kappa_c,
            gamma_b: p.gamma_b,
            nu_b: p.nu_b,
            nu_c: p.nu_c,
            eps_ir: p.eps_ir_thz(),
            steady: Some(s),
        }
    }

    pub fn with_cal_ga(&self, cal_ga: Complex64) -> Self {
        Self { cal_ga, steady: None, ..self.clone() }
    }

    /// Every frequency multiplied by `k` (e.g. `2π` to switch to angular units).
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            delta: k * self.delta,
            cal_ga: k * self.cal_ga,
            g_c: k * self.g_c,
            kappa_a: k * self.kappa_a,
            kappa_c: k * self.kappa_c,
            gamma_b: k * self.gamma_b,
            nu_b: k * self.nu_b,
            nu_c: k * self.nu_c,
            eps_ir: k * self.eps_ir,
            steady: None,
        }
    }
}
