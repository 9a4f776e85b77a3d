use serde::Serialize;

use crate::numerics::{golden_section_max, half_max_crossings, NumericsError};
use crate::operating_point::OperatingPoint;
use crate::response::{solve_response, ResponseError};

use super::{tac_spectrum, AnalysisError};

/// Initial scan covers `ν_b ± BANDWIDTH_HALF_SPAN` THz.
pub const BANDWIDTH_HALF_SPAN: f64 = 5.0;
pub const BANDWIDTH_POINTS: usize = 4001;

const REFINE_REL_TOL: f64 = 1e-3;
const MAX_PASSES: usize = 40;
const MAX_WIDENINGS: usize = 3;
const MIN_REFINE_POINTS: usize = 401;
/// Widths below this are indistinguishable from a pole on the real axis.
const MIN_WIDTH: f64 = 1e-9;

/// Full width at half maximum of the `T_ac` gain peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bandwidth {
    pub width: f64,
    pub left: f64,
    pub right: f64,
    pub peak_omega: f64,
    pub peak_tac: f64,
    pub passes: usize,
}

fn sample(op: &OperatingPoint, lo: f64, hi: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    let curve = tac_spectrum(op, lo, hi, n)?;
    if let Some(w) = curve.first_pole() {
        return Err(AnalysisError::PoleInBand { omega_ir: w });
    }
    let ys = curve.tac.into_iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
    Ok((curve.omega_ir, ys))
}

fn argmax(ys: &[f64]) -> usize {
    ys.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &y)| if y > best.1 { (i, y) } else { best })
        .0
}

/// Measures the gain bandwidth by scanning `ν_b ± 5` THz and repeatedly
/// zooming onto the half-maximum crossings with finer spacing until the
/// width changes by less than 0.1 % between passes.
///
/// A half maximum that runs off the scan window triggers up to three
/// doublings of the window before giving up.
pub fn bandwidth(op: &OperatingPoint) -> Result<Bandwidth, AnalysisError> {
    let center = op.nu_b;
    let mut half_span = BANDWIDTH_HALF_SPAN;
    let (mut lo, mut hi) = (center - half_span, center + half_span);
    let mut n = BANDWIDTH_POINTS;
    let mut widenings = 0;
    let mut prev: Option<f64> = None;

    for pass in 1..=MAX_PASSES {
        let (xs, ys) = sample(op, lo, hi, n)?;
        let (left, right) = match half_max_crossings(&xs, &ys) {
            Ok(c) => c,
            Err(NumericsError::NoPeak) => return Err(AnalysisError::NoPeak),
            Err(NumericsError::HalfMaxNotBracketed { truncated_width, .. }) => {
                if widenings == MAX_WIDENINGS {
                    return Err(AnalysisError::HalfMaxNotBracketed { truncated_width });
                }
                widenings += 1;
                half_span *= 2.0;
                lo = center - half_span;
                hi = center + half_span;
                n = BANDWIDTH_POINTS;
                prev = None;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let width = right - left;
        let imax = argmax(&ys);
        if width < MIN_WIDTH {
            return Err(AnalysisError::PoleInBand { omega_ir: xs[imax] });
        }
        if let Some(p) = prev {
            if (width - p).abs() <= REFINE_REL_TOL * width {
                return Ok(Bandwidth {
                    width,
                    left,
                    right,
                    peak_omega: xs[imax],
                    peak_tac: ys[imax],
                    passes: pass,
                });
            }
        }
        prev = Some(width);

        let h = (hi - lo) / (n - 1) as f64;
        let margin = width.max(4.0 * h);
        lo = left - margin;
        hi = right + margin;
        let fine = h / 4.0;
        n = (((hi - lo) / fine).ceil() as usize + 1).clamp(MIN_REFINE_POINTS, BANDWIDTH_POINTS);
    }
    Err(AnalysisError::Numerics(NumericsError::NoConvergence {
        iterations: MAX_PASSES,
        best: Vec::new(),
        residual: f64::NAN,
    }))
}

/// Largest `T_ac` over probe frequency near `ν_b` and its location.
///
/// Coarse scan over `ν_b ± 5` THz, then golden-section refinement between
/// the neighbours of the best sample.
pub fn peak_tac(op: &OperatingPoint) -> Result<(f64, f64), AnalysisError> {
    let (lo, hi) = (op.nu_b - BANDWIDTH_HALF_SPAN, op.nu_b + BANDWIDTH_HALF_SPAN);
    let (xs, ys) = sample(op, lo, hi, BANDWIDTH_POINTS)?;
    let i = argmax(&ys);
    let a = xs[i.saturating_sub(1)];
    let b = xs[(i + 1).min(xs.len() - 1)];
    let mut pole = None;
    let (w, t) = golden_section_max(
        |w| match solve_response(op, w) {
            Ok(r) => r.tac,
            Err(ResponseError::Diverges { .. }) => {
                pole = Some(w);
                f64::INFINITY
            }
            Err(_) => f64::NAN,
        },
        a,
        b,
        1e-10,
    )?;
    if let Some(omega_ir) = pole {
        return Err(AnalysisError::PoleInBand { omega_ir });
    }
    if t >= ys[i] {
        Ok((w, t))
    } else {
        Ok((xs[i], ys[i]))
    }
}
