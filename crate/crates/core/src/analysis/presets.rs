use num_complex::Complex64;
use serde::Serialize;

use crate::model::{DetuningMode, SystemParams};
use crate::operating_point::OperatingPoint;

use super::{
    sweep, tac_spectrum, AnalysisError, Axis, AxisName, Cell, Metric, SweepRecord, SweepResult, SweepSpec, Table,
};

pub const PRESET_NAMES: [&str; 6] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b"];

const GRID_1D: usize = 400;
const GRID_2D: usize = 60;
const GA_RANGE: (f64, f64) = (0.0, 5.0);
const N_RANGE: (f64, f64) = (1e3, 1e10);
const KAPPA_A_RANGE: (f64, f64) = (2.0, 30.0);
const KAPPA_C_RANGE: (f64, f64) = (0.1, 3.0);
const SPECTRUM_RANGE: (f64, f64) = (29.0, 31.0);
/// Couplings of the spectrum family, THz.
pub const SPECTRUM_COUPLINGS: [f64; 3] = [3.0, 3.2, 3.4];

/// Output of one figure preset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigurePreset {
    pub name: String,
    pub table: Table,
    /// Distinct per-point failures and their counts.
    pub errors: Vec<(String, usize)>,
}

/// Options that change a preset's numerics. The defaults give the fixed,
/// versioned grids.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PresetOptions {
    /// Override for the 1D grid size (400 by default).
    pub points: Option<usize>,
    /// For `fig3a`, also report the numerically re-optimized coupling.
    pub reoptimize: bool,
}

fn with_fixed_delta(base: &SystemParams) -> SystemParams {
    let mut p = base.clone();
    if let DetuningMode::PrescribedGa { delta_thz, .. } = p.detuning_mode {
        p.detuning_mode = DetuningMode::FixedDelta { delta_thz };
    }
    p
}

fn bool_cell(b: Option<bool>) -> Cell {
    b.map_or(Cell::Empty, Cell::Bool)
}

fn rows(table: &mut Table, res: &SweepResult, f: impl Fn(&SweepRecord) -> Vec<Cell>) {
    for r in &res.records {
        table.push(f(r));
    }
}

/// Runs the named figure sweep on top of `base` (normally
/// [`SystemParams::reference`]).
pub fn figure_preset(name: &str, base: &SystemParams, opts: PresetOptions) -> Result<FigurePreset, AnalysisError> {
    let n1 = opts.points.unwrap_or(GRID_1D);
    let ga_axis = || Axis::linear(AxisName::Ga, GA_RANGE.0, GA_RANGE.1, n1);
    let (table, errors) = match name {
        "fig2a" => {
            let res = sweep(base, &SweepSpec::new(vec![ga_axis()], vec![Metric::Tac, Metric::Stability]))?;
            let mut t = Table::new(["ga_thz", "tac", "stable", "spectral_abscissa_thz"]);
            rows(&mut t, &res, |r| {
                vec![
                    Cell::Num(r.coords[0]),
                    Cell::opt(r.tac),
                    bool_cell(r.stable),
                    Cell::opt(r.spectral_abscissa),
                ]
            });
            (t, res.error_summary())
        }
        "fig2b" => {
            let spec = SweepSpec::new(
                vec![Axis::log(AxisName::N, N_RANGE.0, N_RANGE.1, n1)],
                vec![Metric::Tac, Metric::Stability],
            );
            let res = sweep(&with_fixed_delta(base), &spec)?;
            let mut t = Table::new(["n_molecules", "ga_abs_thz", "tac", "stable", "spectral_abscissa_thz"]);
            rows(&mut t, &res, |r| {
                vec![
                    Cell::Num(r.coords[0]),
                    Cell::opt(r.ga_abs),
                    Cell::opt(r.tac),
                    bool_cell(r.stable),
                    Cell::opt(r.spectral_abscissa),
                ]
            });
            (t, res.error_summary())
        }
        "fig3a" | "fig3b" => {
            let mut metrics = vec![Metric::OptimalCoupling];
            let reopt = name == "fig3a" && opts.reoptimize;
            if reopt {
                metrics.push(Metric::OptimizedCoupling);
            }
            let spec = SweepSpec::new(
                vec![
                    Axis::linear(AxisName::KappaA, KAPPA_A_RANGE.0, KAPPA_A_RANGE.1, GRID_2D),
                    Axis::linear(AxisName::KappaC, KAPPA_C_RANGE.0, KAPPA_C_RANGE.1, GRID_2D),
                ],
                metrics,
            );
            // The coupling is set per cell from the formula; the base value is irrelevant.
            let delta = base.detuning_mode.effective_delta().unwrap_or(-base.nu_b);
            let res = sweep(&base.with_prescribed_ga(0.0, delta), &spec)?;
            let mut cols = vec!["kappa_a_thz", "kappa_c_thz", "ga_opt_thz"];
            if name == "fig3a" {
                cols.push("tac_max");
            }
            cols.push("stable");
            if reopt {
                cols.extend(["ga_best_thz", "tac_best"]);
            }
            let mut t = Table::new(cols);
            rows(&mut t, &res, |r| {
                let mut row = vec![Cell::Num(r.coords[0]), Cell::Num(r.coords[1]), Cell::opt(r.optimal_coupling)];
                if name == "fig3a" {
                    row.push(Cell::opt(r.tac_at_optimal));
                }
                row.push(bool_cell(r.stable_at_optimal));
                if reopt {
                    row.extend([Cell::opt(r.optimized_coupling), Cell::opt(r.tac_optimized)]);
                }
                row
            });
            (t, res.error_summary())
        }
        "fig4a" => {
            let delta = base.detuning_mode.effective_delta().unwrap_or(-base.nu_b);
            let v = base
                .with_prescribed_ga(0.0, delta)
                .validate()
                .map_err(|e| AnalysisError::from_violations(&e))?;
            let op0 = OperatingPoint::from_params(&v)?;
            let mut t = Table::new(["ga_thz", "omega_ir_thz", "tac", "pole"]);
            for ga in SPECTRUM_COUPLINGS {
                let op = op0.with_cal_ga(Complex64::new(ga, 0.0));
                let curve = tac_spectrum(&op, SPECTRUM_RANGE.0, SPECTRUM_RANGE.1, n1)?;
                for (w, tac) in curve.omega_ir.iter().zip(&curve.tac) {
                    t.push(vec![Cell::Num(ga), Cell::Num(*w), Cell::opt(*tac), Cell::Bool(tac.is_none())]);
                }
            }
            (t, Vec::new())
        }
        "fig4b" => {
            let res = sweep(base, &SweepSpec::new(vec![ga_axis()], vec![Metric::Bandwidth, Metric::Stability]))?;
            let mut t = Table::new(["ga_thz", "bandwidth_thz", "stable"]);
            rows(&mut t, &res, |r| vec![Cell::Num(r.coords[0]), Cell::opt(r.bandwidth), bool_cell(r.stable)]);
            (t, res.error_summary())
        }
        other => return Err(AnalysisError::UnknownPreset(other.to_string())),
    };
    Ok(FigurePreset { name: name.to_string(), table, errors })
}
