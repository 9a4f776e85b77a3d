use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{DetuningMode, SystemParams};
use crate::operating_point::OperatingPoint;
use crate::response::{optimal_coupling, solve_response, ResponseError};
use crate::stability::stability_report;
use crate::steady_state::default_steady_state;

use super::{bandwidth, linspace, logspace, max_tac_over_ga, peak_tac, AnalysisError, Cell, Table};

/// Parameter a sweep axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    /// `|𝒢_a|` prescribed directly, THz.
    Ga,
    /// Molecule number; `𝒢_a` follows from the steady state.
    N,
    KappaA,
    KappaC,
    #[serde(rename = "gamma_B")]
    GammaB,
    /// Single-molecule optomechanical coupling, GHz.
    GA,
    /// Single-molecule bilinear coupling, GHz.
    GC,
    EpsP,
    /// Effective detuning (bare detuning under `fixed_delta0`), THz.
    Delta,
    /// Probe frequency, THz.
    OmegaIr,
}

impl AxisName {
    pub const ALL: [AxisName; 10] = [
        AxisName::Ga,
        AxisName::N,
        AxisName::KappaA,
        AxisName::KappaC,
        AxisName::GammaB,
        AxisName::GA,
        AxisName::GC,
        AxisName::EpsP,
        AxisName::Delta,
        AxisName::OmegaIr,
    ];

    /// Name used on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Ga => "ga",
            AxisName::N => "N",
            AxisName::KappaA => "kappa_a",
            AxisName::KappaC => "kappa_c",
            AxisName::GammaB => "gamma_B",
            AxisName::GA => "g_a",
            AxisName::GC => "g_c",
            AxisName::EpsP => "eps_p",
            AxisName::Delta => "delta",
            AxisName::OmegaIr => "omega_ir",
        }
    }

    /// CSV column header, with unit suffix.
    pub fn column(self) -> &'static str {
        match self {
            AxisName::Ga => "ga_thz",
            AxisName::N => "n_molecules",
            AxisName::KappaA => "kappa_a_thz",
            AxisName::KappaC => "kappa_c_thz",
            AxisName::GammaB => "gamma_b_thz",
            AxisName::GA => "g_a_ghz",
            AxisName::GC => "g_c_ghz",
            AxisName::EpsP => "eps_p_thz",
            AxisName::Delta => "delta_thz",
            AxisName::OmegaIr => "omega_ir_thz",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| AnalysisError::UnknownAxis(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linear(name: AxisName, lo: f64, hi: f64, n: usize) -> Self {
        Self { name, values: linspace(lo, hi, n) }
    }

    pub fn log(name: AxisName, lo: f64, hi: f64, n: usize) -> Self {
        Self { name, values: logspace(lo, hi, n) }
    }

    pub fn points(name: AxisName, values: Vec<f64>) -> Self {
        Self { name, values }
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        if self.values.is_empty() {
            return Err(AnalysisError::InvalidGrid(format!("axis {} is empty", self.name)));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::InvalidGrid(format!("axis {} has non-finite values", self.name)));
        }
        Ok(())
    }
}

/// `name:lo:hi:n` or `name:lo:hi:n:log`.
impl FromStr for Axis {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AnalysisError::InvalidGrid(format!("axis spec '{s}' (expected name:lo:hi:n[:log])"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad());
        }
        let name: AxisName = parts[0].parse()?;
        let lo: f64 = parts[1].parse().map_err(|_| bad())?;
        let hi: f64 = parts[2].parse().map_err(|_| bad())?;
        let n: usize = parts[3].parse().map_err(|_| bad())?;
        if n == 0 || !(lo <= hi) || (n > 1 && lo == hi) {
            return Err(bad());
        }
        match parts.get(4) {
            None => Ok(Axis::linear(name, lo, hi, n)),
            Some(&"log") if lo > 0.0 => Ok(Axis::log(name, lo, hi, n)),
            Some(_) => Err(bad()),
        }
    }
}

/// Per-point quantities a sweep can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `T_ac` at the probe frequency (default `ν_b`).
    Tac,
    /// Peak `T_ac` over probe frequency and its location.
    TacMax,
    /// Gain bandwidth; blank at unstable points.
    Bandwidth,
    /// Verdict and spectral abscissa at the point's own coupling.
    Stability,
    /// Formula `|𝒢_a^(*)|`, resonant `T_ac` there, and its stability.
    OptimalCoupling,
    /// Numerical maximum of resonant `T_ac` over stable couplings.
    OptimizedCoupling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub metrics: Vec<Metric>,
    /// Probe frequency for `Tac`; `ν_b` when absent.
    pub omega_ir: Option<f64>,
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>, metrics: Vec<Metric>) -> Self {
        Self { axes, metrics, omega_ir: None }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn has(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }
}

/// Everything evaluated at one grid point. Fields are `None` when not
/// requested or when evaluation failed; failures are listed in `errors`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SweepRecord {
    pub coords: Vec<f64>,
    pub ga_abs: Option<f64>,
    pub delta: Option<f64>,
    pub tac: Option<f64>,
    pub tac_max: Option<f64>,
    pub tac_max_omega: Option<f64>,
    pub bandwidth: Option<f64>,
    pub stable: Option<bool>,
    pub spectral_abscissa: Option<f64>,
    pub optimal_coupling: Option<f64>,
    pub tac_at_optimal: Option<f64>,
    pub stable_at_optimal: Option<bool>,
    pub optimized_coupling: Option<f64>,
    pub tac_optimized: Option<f64>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Number of points with at least one recorded error.
    pub fn error_count(&self) -> usize {
        self.records.iter().filter(|r| !r.errors.is_empty()).count()
    }

    /// Distinct error messages with how many points hit each, in first-seen order.
    pub fn error_summary(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for e in self.records.iter().flat_map(|r| &r.errors) {
            match out.iter_mut().find(|(m, _)| m == e) {
                Some((_, n)) => *n += 1,
                None => out.push((e.clone(), 1)),
            }
        }
        out
    }

    /// Axis coordinates, `|𝒢_a|`, then the columns of each requested metric.
    pub fn to_table(&self) -> Table {
        let spec = &self.spec;
        let mut cols: Vec<&str> = spec.axes.iter().map(|a| a.name.column()).collect();
        let ga_is_axis = spec.axes.iter().any(|a| a.name == AxisName::Ga);
        if !ga_is_axis {
            cols.push("ga_abs_thz");
        }
        for m in &spec.metrics {
            cols.extend_from_slice(metric_columns(*m));
        }
        let mut t = Table::new(cols);
        for r in &self.records {
            let mut row: Vec<Cell> = r.coords.iter().map(|&v| Cell::Num(v)).collect();
            if !ga_is_axis {
                row.push(Cell::opt(r.ga_abs));
            }
            for m in &spec.metrics {
                row.extend(metric_cells(*m, r));
            }
            t.push(row);
        }
        t
    }
}

fn metric_columns(m: Metric) -> &'static [&'static str] {
    match m {
        Metric::Tac => &["tac"],
        Metric::TacMax => &["tac_max", "tac_max_omega_thz"],
        Metric::Bandwidth => &["bandwidth_thz"],
        Metric::Stability => &["stable", "spectral_abscissa_thz"],
        Metric::OptimalCoupling => &["ga_opt_thz", "tac_at_opt", "stable_at_opt"],
        Metric::OptimizedCoupling => &["ga_best_thz", "tac_best"],
    }
}

fn bool_cell(b: Option<bool>) -> Cell {
    b.map_or(Cell::Empty, Cell::Bool)
}

fn metric_cells(m: Metric, r: &SweepRecord) -> Vec<Cell> {
    match m {
        Metric::Tac => vec![Cell::opt(r.tac)],
        Metric::TacMax => vec![Cell::opt(r.tac_max), Cell::opt(r.tac_max_omega)],
        Metric::Bandwidth => vec![Cell::opt(r.bandwidth)],
        Metric::Stability => vec![bool_cell(r.stable), Cell::opt(r.spectral_abscissa)],
        Metric::OptimalCoupling => vec![
            Cell::opt(r.optimal_coupling),
            Cell::opt(r.tac_at_optimal),
            bool_cell(r.stable_at_optimal),
        ],
        Metric::OptimizedCoupling => vec![Cell::opt(r.optimized_coupling), Cell::opt(r.tac_optimized)],
    }
}

/// Sets one parameter on a copy of `p`. `fallback_delta` supplies `Δ` when a
/// `ga` value is prescribed on top of a bare-detuning mode.
fn apply(p: &mut SystemParams, name: AxisName, v: f64, fallback_delta: f64, probe: &mut Option<f64>) {
    match name {
        AxisName::Ga => {
            let delta = p.detuning_mode.effective_delta().unwrap_or(fallback_delta);
            p.detuning_mode = DetuningMode::PrescribedGa { ga_thz: v, delta_thz: delta };
        }
        AxisName::N => p.n_molecules = v,
        AxisName::KappaA => p.kappa_a = v,
        AxisName::KappaC => p.kappa_c = v,
        AxisName::GammaB => p.gamma_b = v,
        AxisName::GA => p.g_a = v,
        AxisName::GC => p.g_c = v,
        AxisName::EpsP => p.eps_p = v,
        AxisName::Delta => {
            p.detuning_mode = match p.detuning_mode {
                DetuningMode::FixedDelta { .. } => DetuningMode::FixedDelta { delta_thz: v },
                DetuningMode::FixedDelta0 { .. } => DetuningMode::FixedDelta0 { delta0_thz: v },
                DetuningMode::PrescribedGa { ga_thz, .. } => DetuningMode::PrescribedGa { ga_thz, delta_thz: v },
            }
        }
        AxisName::OmegaIr => *probe = Some(v),
    }
}

fn resolve_point(
    base: &SystemParams,
    spec: &SweepSpec,
    coords: &[f64],
    fallback_delta: f64,
) -> Result<(OperatingPoint, f64), AnalysisError> {
    let mut p = base.clone();
    let mut probe = spec.omega_ir;
    // Detuning first and |𝒢_a| last, so a prescribed coupling picks up the swept Δ.
    let mut order: Vec<usize> = (0..spec.axes.len()).collect();
    order.sort_by_key(|&i| match spec.axes[i].name {
        AxisName::Delta => 0,
        AxisName::Ga => 2,
        _ => 1,
    });
    for i in order {
        apply(&mut p, spec.axes[i].name, coords[i], fallback_delta, &mut probe);
    }
    let v = p.validate().map_err(|e| AnalysisError::from_violations(&e))?;
    let op = OperatingPoint::from_params(&v)?;
    let w = probe.unwrap_or(op.nu_b);
    Ok((op, w))
}

fn evaluate(base: &SystemParams, spec: &SweepSpec, coords: Vec<f64>, fallback_delta: f64) -> SweepRecord {
    let mut r = SweepRecord { coords, ..Default::default() };
    let (op, probe) = match resolve_point(base, spec, &r.coords, fallback_delta) {
        Ok(x) => x,
        Err(e) => {
            r.errors.push(e.to_string());
            return r;
        }
    };
    r.ga_abs = Some(op.cal_ga.norm());
    r.delta = Some(op.delta);
    fn fail(r: &mut SweepRecord, what: &str, e: AnalysisError) {
        r.errors.push(format!("{what}: {e}"));
    }

    let needs_stability = spec.has(Metric::Stability) || spec.has(Metric::Bandwidth);
    if needs_stability {
        match stability_report(&op) {
            Ok(s) => {
                r.stable = Some(s.is_stable());
                r.spectral_abscissa = Some(s.spectral_abscissa);
            }
            Err(e) => fail(&mut r, "stability", e.into()),
        }
    }
    if spec.has(Metric::Tac) {
        match solve_response(&op, probe) {
            Ok(x) => r.tac = Some(x.tac),
            Err(ResponseError::Diverges { .. }) => fail(&mut r, "tac", AnalysisError::PoleInBand { omega_ir: probe }),
            Err(e) => fail(&mut r, "tac", e.into()),
        }
    }
    if spec.has(Metric::TacMax) {
        match peak_tac(&op) {
            Ok((w, t)) => {
                r.tac_max = Some(t);
                r.tac_max_omega = Some(w);
            }
            Err(e) => fail(&mut r, "tac_max", e),
        }
    }
    // Bandwidth is left blank wherever the point is not known to be stable.
    if spec.has(Metric::Bandwidth) && r.stable == Some(true) {
        match bandwidth(&op) {
            Ok(b) => r.bandwidth = Some(b.width),
            Err(e) => fail(&mut r, "bandwidth", e),
        }
    }
    if spec.has(Metric::OptimalCoupling) {
        let g = optimal_coupling(&op);
        r.optimal_coupling = Some(g);
        let at = op.with_cal_ga(Complex64::new(g, 0.0));
        match solve_response(&at, op.nu_b) {
            Ok(x) => r.tac_at_optimal = Some(x.tac),
            Err(e) => fail(&mut r, "tac_at_opt", e.into()),
        }
        match stability_report(&at) {
            Ok(s) => r.stable_at_optimal = Some(s.is_stable()),
            Err(e) => fail(&mut r, "stable_at_opt", e.into()),
        }
    }
    if spec.has(Metric::OptimizedCoupling) {
        let hi = 2.0 * optimal_coupling(&op);
        match max_tac_over_ga(&op, 0.0, hi) {
            Ok(o) => {
                r.optimized_coupling = Some(o.ga);
                r.tac_optimized = Some(o.tac);
            }
            Err(e) => fail(&mut r, "optimized", e),
        }
    }
    r
}

/// Effective detuning used when a `ga` axis overrides a bare-detuning base.
fn base_delta(base: &SystemParams) -> f64 {
    if let Some(d) = base.detuning_mode.effective_delta() {
        return d;
    }
    base.clone()
        .validate()
        .ok()
        .and_then(|v| default_steady_state(&v).ok())
        .map_or(f64::NAN, |s| s.delta_eff)
}

/// Evaluates every point of a one- or two-axis grid.
///
/// Points run in parallel on the current rayon pool; records come back in
/// grid order with the first axis varying slowest. Failures at a point are
/// stored in that record and never abort the sweep.
pub fn sweep(base: &SystemParams, spec: &SweepSpec) -> Result<SweepResult, AnalysisError> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(AnalysisError::InvalidGrid(format!(
            "a sweep needs one or two axes, got {}",
            spec.axes.len()
        )));
    }
    for a in &spec.axes {
        a.validate()?;
    }
    if spec.axes.len() == 2 && spec.axes[0].name == spec.axes[1].name {
        return Err(AnalysisError::InvalidGrid(format!("axis {} given twice", spec.axes[0].name)));
    }
    let fallback_delta = base_delta(base);
    let inner = spec.axes.get(1).map_or(1, |a| a.values.len());
    let records = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let mut coords = vec![spec.axes[0].values[k / inner]];
            if let Some(a) = spec.axes.get(1) {
                coords.push(a.values[k % inner]);
            }
            evaluate(base, spec, coords, fallback_delta)
        })
        .collect();
    Ok(SweepResult { spec: spec.clone(), records })
}
