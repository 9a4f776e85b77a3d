//! Derived quantities built on the linear response and stability checks:
//! spectra, gain bandwidth, coupling optimization, parameter sweeps and the
//! named figure presets.

mod bandwidth;
mod optimize;
mod presets;
mod spectrum;
mod sweep;
mod table;

pub use bandwidth::{bandwidth, peak_tac, Bandwidth, BANDWIDTH_HALF_SPAN, BANDWIDTH_POINTS};
pub use optimize::{max_tac_over_ga, CouplingOptimum, COUPLING_SCAN_POINTS};
pub use presets::{figure_preset, FigurePreset, PresetOptions, PRESET_NAMES, SPECTRUM_COUPLINGS};
pub use spectrum::{tac_spectrum, SpectrumCurve};
pub use sweep::{sweep, Axis, AxisName, Metric, SweepRecord, SweepResult, SweepSpec};
pub use table::{Cell, Table};

use thiserror::Error;

use crate::model::ParamViolation;
use crate::numerics::NumericsError;
use crate::response::ResponseError;
use crate::stability::StabilityError;
use crate::steady_state::SteadyStateError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("gain pole inside the scanned band near omega_ir = {omega_ir} THz")]
    PoleInBand { omega_ir: f64 },
    #[error("spectrum has no peak")]
    NoPeak,
    #[error("half maximum not bracketed; truncated width {truncated_width} THz")]
    HalfMaxNotBracketed { truncated_width: f64 },
    #[error("every coupling in [{lo}, {hi}] THz is unstable")]
    AllUnstable { lo: f64, hi: f64 },
    #[error("unknown sweep axis '{0}'")]
    UnknownAxis(String),
    #[error("unknown figure preset '{0}'")]
    UnknownPreset(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Response(#[from] ResponseError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    SteadyState(#[from] SteadyStateError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl AnalysisError {
    pub(crate) fn from_violations(v: &[ParamViolation]) -> Self {
        let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
        AnalysisError::InvalidParams(msgs.join("; "))
    }
}

/// `n` evenly spaced points including both ends.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` logarithmically spaced points including both ends; `lo`, `hi` > 0.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let mut v: Vec<f64> = linspace(a, b, n).into_iter().map(|e| 10f64.powf(e)).collect();
    if let Some(first) = v.first_mut() {
        *first = lo;
    }
    if n > 1 {
        v[n - 1] = hi;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let l = logspace(1e3, 1e10, 8);
        assert_eq!(l[0], 1e3);
        assert_eq!(l[7], 1e10);
        assert!((l[3] - 1e6).abs() < 1e-3);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
