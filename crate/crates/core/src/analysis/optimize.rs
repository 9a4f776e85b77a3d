use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::golden_section_max;
use crate::operating_point::OperatingPoint;
use crate::response::{solve_response, ResponseError};
use crate::stability::stability_report;

use super::{linspace, AnalysisError};

pub const COUPLING_SCAN_POINTS: usize = 64;
const GOLDEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingOptimum {
    /// `|𝒢_a|` at the maximum, THz.
    pub ga: f64,
    /// Resonant `T_ac` (probe at `ν_b`) there.
    pub tac: f64,
    pub stable: bool,
}

fn resonant(op: &OperatingPoint, ga: f64) -> Result<f64, AnalysisError> {
    match solve_response(&op.with_cal_ga(Complex64::new(ga, 0.0)), op.nu_b) {
        Ok(r) => Ok(r.tac),
        Err(ResponseError::Diverges { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

fn is_stable(op: &OperatingPoint, ga: f64) -> Result<bool, AnalysisError> {
    Ok(stability_report(&op.with_cal_ga(Complex64::new(ga, 0.0)))?.is_stable())
}

/// Last stable coupling between a stable `from` and an unstable `to`, by bisection.
fn stability_edge(op: &OperatingPoint, mut from: f64, mut to: f64) -> Result<f64, AnalysisError> {
    while (to - from).abs() > GOLDEN_TOL {
        let mid = 0.5 * (from + to);
        if is_stable(op, mid)? {
            from = mid;
        } else {
            to = mid;
        }
    }
    Ok(from)
}

/// Maximizes the resonant conversion efficiency over `|𝒢_a| ∈ [lo, hi]`,
/// considering stable couplings only.
///
/// A 64-point scan picks the best stable sample; golden-section search then
/// refines it inside the neighbouring samples. The coupling phase is taken
/// as zero.
pub fn max_tac_over_ga(op: &OperatingPoint, lo: f64, hi: f64) -> Result<CouplingOptimum, AnalysisError> {
    if !(lo < hi) || lo < 0.0 {
        return Err(AnalysisError::InvalidGrid(format!("coupling range [{lo}, {hi}]")));
    }
    let grid = linspace(lo, hi, COUPLING_SCAN_POINTS);
    let mut best: Option<(usize, f64)> = None;
    for (i, &g) in grid.iter().enumerate() {
        if !is_stable(op, g)? {
            continue;
        }
        let t = resonant(op, g)?;
        if best.map_or(true, |(_, bt)| t > bt) {
            best = Some((i, t));
        }
    }
    let (i, t_grid) = best.ok_or(AnalysisError::AllUnstable { lo, hi })?;

    // Unstable neighbours are replaced by the stability edge between them and the best sample.
    let left = match i.checked_sub(1) {
        Some(j) if is_stable(op, grid[j])? => grid[j],
        Some(j) => stability_edge(op, grid[i], grid[j])?,
        None => grid[i],
    };
    let right = match grid.get(i + 1) {
        Some(&g) if is_stable(op, g)? => g,
        Some(&g) => stability_edge(op, grid[i], g)?,
        None => grid[i],
    };
    if left == right {
        return Ok(CouplingOptimum { ga: grid[i], tac: t_grid, stable: true });
    }
    let mut err = None;
    let (g, t) = golden_section_max(
        |g| match resonant(op, g) {
            Ok(t) => t,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        left,
        right,
        GOLDEN_TOL,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    if t > t_grid && t.is_finite() && is_stable(op, g)? {
        Ok(CouplingOptimum { ga: g, tac: t, stable: true })
    } else {
        Ok(CouplingOptimum { ga: grid[i], tac: t_grid, stable: true })
    }
}
