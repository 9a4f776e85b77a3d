use rayon::prelude::*;
use serde::Serialize;

use crate::operating_point::OperatingPoint;
use crate::response::{solve_response, ResponseError};

use super::{linspace, AnalysisError};

/// `T_ac` sampled over probe frequency. `None` marks a gain pole.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCurve {
    pub omega_ir: Vec<f64>,
    pub tac: Vec<Option<f64>>,
    /// `|𝒢_a|`, THz.
    pub ga_abs: f64,
    pub delta: f64,
}

impl SpectrumCurve {
    pub fn len(&self) -> usize {
        self.omega_ir.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_ir.is_empty()
    }

    pub fn has_pole(&self) -> bool {
        self.tac.iter().any(Option::is_none)
    }

    pub fn first_pole(&self) -> Option<f64> {
        self.omega_ir.iter().zip(&self.tac).find(|(_, t)| t.is_none()).map(|(w, _)| *w)
    }

    /// Largest sampled value and where it occurs.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.omega_ir
            .iter()
            .zip(&self.tac)
            .filter_map(|(w, t)| t.map(|t| (*w, t)))
            .fold(None, |best: Option<(f64, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
    }

    /// Outermost interval on which `T_ac` exceeds `level`, with endpoints
    /// interpolated linearly between samples.
    pub fn band_above(&self, level: f64) -> Option<(f64, f64)> {
        let ys: Vec<f64> = self.tac.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
        let xs = &self.omega_ir;
        let first = ys.iter().position(|&y| y > level)?;
        let last = ys.iter().rposition(|&y| y > level)?;
        let cross = |i: usize, j: usize| {
            let (x0, y0, x1, y1) = (xs[i], ys[i], xs[j], ys[j]);
            x0 + (level - y0) * (x1 - x0) / (y1 - y0)
        };
        let left = if first == 0 { xs[0] } else { cross(first - 1, first) };
        let right = if last == xs.len() - 1 { xs[last] } else { cross(last, last + 1) };
        Some((left, right))
    }
}

/// Evaluates the exact response at each point of an evenly spaced grid.
///
/// Points are computed in parallel and assembled by grid index.
pub fn tac_spectrum(
    op: &OperatingPoint,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<SpectrumCurve, AnalysisError> {
    if !(lo < hi) || points < 2 {
        return Err(AnalysisError::InvalidGrid(format!(
            "spectrum grid [{lo}, {hi}] with {points} points"
        )));
    }
    let omega_ir = linspace(lo, hi, points);
    let tac = omega_ir
        .par_iter()
        .map(|&w| match solve_response(op, w) {
            Ok(r) => Ok(Some(r.tac)),
            Err(ResponseError::Diverges { .. }) => Ok(None),
            Err(e) => Err(AnalysisError::Response(e)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpectrumCurve {
        omega_ir,
        tac,
        ga_abs: op.cal_ga.norm(),
        delta: op.delta,
    })
}
