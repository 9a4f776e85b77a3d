//! `molopt` command-line interface.
//!
//! Every subcommand loads a JSON parameter file, applies flag overrides,
//! validates, runs one computation and writes either to stdout or to
//! `--out <dir>` as CSV (plus an optional JSON mirror) with a manifest.

mod config;
mod manifest;

pub use config::{load_config, parse_config, ConfigError, OPTIONAL_FIELDS, REQUIRED_FIELDS};
pub use manifest::{ErrorCount, RunManifest};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{
    bandwidth, figure_preset, sweep, tac_spectrum, AnalysisError, Axis, Cell, Metric, PresetOptions, SweepSpec,
    Table, PRESET_NAMES,
};
use crate::model::{DetuningMode, ParamViolation, SystemParams, ValidatedParams};
use crate::operating_point::OperatingPoint;
use crate::response::{solve_response, ResponseError};
use crate::stability::{stability_report, StabilityError};
use crate::steady_state::{default_steady_state, solve_cubic_branches, SteadyStateError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

const DEFAULT_SPECTRUM_POINTS: usize = 2001;
const DEFAULT_SPECTRUM_HALF_SPAN: f64 = 1.0;

#[derive(Debug, Parser)]
#[command(name = "molopt", version, about = "Molecular optomechanical IR up-conversion simulator")]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state mean fields and the linearized coupling.
    Steady(Common),
    /// Linear response at one probe frequency.
    Response(Common),
    /// Conversion efficiency over a probe-frequency range.
    Spectrum(SpectrumArgs),
    /// Gain bandwidth (FWHM of the conversion peak).
    Bandwidth(Common),
    /// Stability verdict and spectral abscissa.
    Stability(Common),
    /// One- or two-axis parameter sweep.
    Sweep(SweepArgs),
    /// Data behind a named figure.
    Fig(FigArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON parameter file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; results go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Prescribe |𝒢_a| in THz (switches to the prescribed-coupling mode).
    #[arg(long, allow_hyphen_values = true)]
    ga: Option<f64>,
    /// Effective detuning Δ in THz.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Probe frequency in THz (default ν_b).
    #[arg(long = "omega-ir", allow_hyphen_values = true)]
    omega_ir: Option<f64>,
    /// Grid size.
    #[arg(long)]
    points: Option<usize>,
    /// Emit JSON (stdout) or an additional JSON file (with --out).
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    /// Lower end of the probe range, THz (default ν_b − 1).
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    /// Upper end of the probe range, THz (default ν_b + 1).
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Axis as name:lo:hi:n[:log]; give once or twice.
    #[arg(long = "axis", required = true)]
    axes: Vec<String>,
    /// Metrics to evaluate.
    #[arg(long = "metric", value_enum, default_values_t = [MetricArg::Tac, MetricArg::Stability])]
    metrics: Vec<MetricArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MetricArg {
    Tac,
    TacMax,
    Bandwidth,
    Stability,
    OptimalCoupling,
    OptimizedCoupling,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Tac => Metric::Tac,
            MetricArg::TacMax => Metric::TacMax,
            MetricArg::Bandwidth => Metric::Bandwidth,
            MetricArg::Stability => Metric::Stability,
            MetricArg::OptimalCoupling => Metric::OptimalCoupling,
            MetricArg::OptimizedCoupling => Metric::OptimizedCoupling,
        }
    }
}

#[derive(Debug, Args)]
struct FigArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: String,
    /// fig3a: also report the numerically re-optimized coupling.
    #[arg(long)]
    reoptimize: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid parameters: {}", join(.0))]
    Validation(Vec<ParamViolation>),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn join(v: &[ParamViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => EXIT_NUMERIC,
            _ => EXIT_INVALID,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidGrid(_) | AnalysisError::UnknownAxis(_) | AnalysisError::UnknownPreset(_) => {
                CliError::Usage(e.to_string())
            }
            AnalysisError::InvalidParams(m) => CliError::Usage(format!("invalid parameters: {m}")),
            AnalysisError::SteadyState(e) => e.into(),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<SteadyStateError> for CliError {
    fn from(e: SteadyStateError) -> Self {
        match e {
            SteadyStateError::PrescribedCoupling | SteadyStateError::NeedsBareDetuning => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<ResponseError> for CliError {
    fn from(e: ResponseError) -> Self {
        match e {
            ResponseError::ZeroSignal => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    // Results are buffered so the command can run inside a rayon pool.
    let mut buf: Vec<u8> = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &mut buf)),
            Err(e) => Err(CliError::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli.command, &mut buf),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "molopt: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command, out: &mut Vec<u8>) -> Result<(), CliError> {
    match cmd {
        Command::Steady(c) => cmd_steady(c, out),
        Command::Response(c) => cmd_response(c, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Bandwidth(c) => cmd_bandwidth(c, out),
        Command::Stability(c) => cmd_stability(c, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Fig(a) => cmd_fig(a, out),
    }
}

/// Applies `--ga` and `--delta` on top of the file values.
pub fn apply_overrides(p: &mut SystemParams, ga: Option<f64>, delta: Option<f64>) -> Result<(), CliError> {
    if let Some(d) = delta {
        p.detuning_mode = match p.detuning_mode {
            DetuningMode::PrescribedGa { ga_thz, .. } => DetuningMode::PrescribedGa { ga_thz, delta_thz: d },
            _ => DetuningMode::FixedDelta { delta_thz: d },
        };
    }
    if let Some(g) = ga {
        let d = match p.detuning_mode.effective_delta() {
            Some(d) => d,
            None => {
                let v = p.clone().validate().map_err(CliError::Validation)?;
                default_steady_state(&v)?.delta_eff
            }
        };
        p.detuning_mode = DetuningMode::PrescribedGa { ga_thz: g, delta_thz: d };
    }
    Ok(())
}

struct Resolved {
    params: ValidatedParams,
    warnings: Vec<String>,
}

fn resolve(c: &Common, required: bool) -> Result<Resolved, CliError> {
    let mut p = match &c.config {
        Some(path) => load_config(path)?,
        None if required => return Err(CliError::Usage("--config <path> is required".into())),
        None => SystemParams::reference(),
    };
    apply_overrides(&mut p, c.ga, c.delta)?;
    let params = p.validate().map_err(CliError::Validation)?;
    let warnings = params.warnings().iter().map(ToString::to_string).collect();
    Ok(Resolved { params, warnings })
}

/// Writes a table to stdout or to `<out>/<stem>.csv` with its manifest.
fn emit(
    c: &Common,
    stem: &str,
    table: &Table,
    extra_json: Option<Value>,
    manifest: RunManifest,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let json_body = || {
        let mut v = json!({ "columns": table.columns, "rows": table.to_json_records() });
        if let Some(x) = &extra_json {
            v["details"] = x.clone();
        }
        let mut s = serde_json::to_string_pretty(&v).expect("table serializes");
        s.push('\n');
        s
    };
    match &c.out {
        None => {
            if c.json {
                out.write_all(json_body().as_bytes())?;
            } else {
                table.write_csv(&mut *out)?;
            }
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let mut manifest = manifest;
            let csv_name = format!("{stem}.csv");
            write_file(&dir.join(&csv_name), table.to_csv_string().as_bytes())?;
            manifest.outputs.push(csv_name.clone());
            writeln!(out, "wrote {}", dir.join(&csv_name).display())?;
            if c.json {
                let json_name = format!("{stem}.json");
                write_file(&dir.join(&json_name), json_body().as_bytes())?;
                manifest.outputs.push(json_name.clone());
                writeln!(out, "wrote {}", dir.join(&json_name).display())?;
            }
            let m_name = format!("{stem}.manifest.json");
            write_file(&dir.join(&m_name), manifest.to_json().as_bytes())?;
            writeln!(out, "wrote {}", dir.join(&m_name).display())?;
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Key/value listing for single-row results on a terminal.
fn print_record(table: &Table, out: &mut dyn Write) -> std::io::Result<()> {
    let width = table.columns.iter().map(|c| c.len()).max().unwrap_or(0);
    for row in &table.rows {
        for (k, v) in table.columns.iter().zip(row) {
            writeln!(out, "{k:<width$}  {}", v.render())?;
        }
    }
    Ok(())
}

fn emit_record(
    c: &Common,
    stem: &str,
    table: &Table,
    extra_json: Option<Value>,
    manifest: RunManifest,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if c.out.is_none() && !c.json {
        print_record(table, out)?;
        Ok(())
    } else {
        emit(c, stem, table, extra_json, manifest, out)
    }
}

fn operating_point(r: &Resolved) -> Result<OperatingPoint, CliError> {
    Ok(OperatingPoint::from_params(&r.params)?)
}

fn cmd_steady(c: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let r = resolve(c, true)?;
    let s = default_steady_state(&r.params)?;
    let mut t = Table::new([
        "delta_thz",
        "delta0_thz",
        "a_ss_abs",
        "a_ss_re",
        "a_ss_im",
        "b_ss_re",
        "b_ss_im",
        "c_ss_re",
        "c_ss_im",
        "ga_abs_thz",
        "ga_phase_rad",
        "x_b",
        "branch_id",
        "converged",
        "iterations",
        "max_residual",
    ]);
    t.push(vec![
        Cell::Num(s.delta_eff),
        Cell::Num(s.delta0),
        Cell::Num(s.a_ss.norm()),
        Cell::Num(s.a_ss.re),
        Cell::Num(s.a_ss.im),
        Cell::Num(s.b_ss.re),
        Cell::Num(s.b_ss.im),
        Cell::Num(s.c_ss.re),
        Cell::Num(s.c_ss.im),
        Cell::Num(s.cal_ga.norm()),
        Cell::Num(s.cal_ga.arg()),
        Cell::Num(s.x_b),
        Cell::Num(s.branch_id as f64),
        Cell::Bool(s.converged),
        Cell::Num(s.iterations as f64),
        Cell::Num(s.max_residual()),
    ]);
    let branches = match r.params.detuning_mode {
        DetuningMode::FixedDelta0 { .. } => solve_cubic_branches(&r.params).unwrap_or_default(),
        _ => Vec::new(),
    };
    if branches.len() > 1 {
        log::warn!("{} steady-state branches; reporting the default one", branches.len());
    }
    let details = json!({ "steady_state": s, "branches": branches });
    let m = RunManifest::new("steady", r.params.params().clone(), r.warnings.clone(), json!({}));
    emit_record(c, "steady", &t, Some(details), m, out)
}

fn cmd_response(c: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let r = resolve(c, true)?;
    let op = operating_point(&r)?;
    let w = c.omega_ir.unwrap_or(op.nu_b);
    let x = solve_response(&op, w)?;
    let mut cols = vec!["omega_ir_thz".to_string()];
    let mut row = vec![Cell::Num(w)];
    let parts: [(&str, Complex64); 9] = [
        ("a_plus", x.a_plus),
        ("a_minus", x.a_minus),
        ("c_plus", x.c_plus),
        ("c_minus", x.c_minus),
        ("b_plus", x.b_plus),
        ("b_minus", x.b_minus),
        ("a_out_plus", x.a_out_plus),
        ("a_out_minus", x.a_out_minus),
        ("t_ac", x.t_ac),
    ];
    for (name, z) in parts {
        cols.push(format!("{name}_re"));
        cols.push(format!("{name}_im"));
        row.push(Cell::Num(z.re));
        row.push(Cell::Num(z.im));
    }
    cols.extend(["tac".to_string(), "tac_antistokes".to_string()]);
    row.extend([Cell::Num(x.tac), Cell::Num(x.tac_antistokes)]);
    let mut t = Table::new(cols);
    t.push(row);
    let m = RunManifest::new(
        "response",
        r.params.params().clone(),
        r.warnings.clone(),
        json!({ "omega_ir_thz": w, "ga_abs_thz": op.cal_ga.norm(), "delta_thz": op.delta }),
    );
    emit_record(c, "response", &t, None, m, out)
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &a.common;
    let r = resolve(c, true)?;
    let op = operating_point(&r)?;
    let lo = a.from.unwrap_or(op.nu_b - DEFAULT_SPECTRUM_HALF_SPAN);
    let hi = a.to.unwrap_or(op.nu_b + DEFAULT_SPECTRUM_HALF_SPAN);
    let n = c.points.unwrap_or(DEFAULT_SPECTRUM_POINTS);
    let curve = tac_spectrum(&op, lo, hi, n)?;
    let mut t = Table::new(["omega_ir_thz", "tac", "pole"]);
    for (w, v) in curve.omega_ir.iter().zip(&curve.tac) {
        t.push(vec![Cell::Num(*w), Cell::opt(*v), Cell::Bool(v.is_none())]);
    }
    let poles: Vec<(String, usize)> = match curve.tac.iter().filter(|v| v.is_none()).count() {
        0 => Vec::new(),
        k => vec![("gain pole (tac undefined)".to_string(), k)],
    };
    let m = RunManifest::new(
        "spectrum",
        r.params.params().clone(),
        r.warnings.clone(),
        json!({ "from_thz": lo, "to_thz": hi, "points": n, "ga_abs_thz": curve.ga_abs, "delta_thz": curve.delta }),
    )
    .with_errors(&poles);
    emit(c, "spectrum", &t, None, m, out)
}

fn cmd_bandwidth(c: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let r = resolve(c, true)?;
    let op = operating_point(&r)?;
    let b = bandwidth(&op)?;
    let mut t = Table::new(["bandwidth_thz", "left_thz", "right_thz", "peak_omega_thz", "peak_tac"]);
    t.push(vec![
        Cell::Num(b.width),
        Cell::Num(b.left),
        Cell::Num(b.right),
        Cell::Num(b.peak_omega),
        Cell::Num(b.peak_tac),
    ]);
    let m = RunManifest::new(
        "bandwidth",
        r.params.params().clone(),
        r.warnings.clone(),
        json!({ "ga_abs_thz": op.cal_ga.norm(), "delta_thz": op.delta }),
    );
    emit_record(c, "bandwidth", &t, None, m, out)
}

fn cmd_stability(c: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let r = resolve(c, true)?;
    let op = operating_point(&r)?;
    let s = stability_report(&op)?;
    let verdict = if s.is_stable() { "STABLE" } else { "UNSTABLE" };
    let mut t = Table::new(["stable", "spectral_abscissa_thz", "routh", "methods_agree", "borderline"]);
    t.push(vec![
        Cell::Bool(s.is_stable()),
        Cell::Num(s.spectral_abscissa),
        Cell::Text(format!("{:?}", s.routh).to_lowercase()),
        Cell::Bool(s.methods_agree),
        Cell::Bool(s.margin_note),
    ]);
    if c.out.is_none() && !c.json {
        writeln!(out, "{verdict}, spectral abscissa {:+} THz", s.spectral_abscissa)?;
        writeln!(out, "routh: {:?}; methods agree: {}", s.routh, s.methods_agree)?;
        for z in &s.eigenvalues {
            writeln!(out, "  eigenvalue {:+} {:+}i THz", z.re, z.im)?;
        }
        return Ok(());
    }
    let details = json!({ "eigenvalues": s.eigenvalues, "char_poly": s.char_poly });
    let m = RunManifest::new(
        "stability",
        r.params.params().clone(),
        r.warnings.clone(),
        json!({ "ga_abs_thz": op.cal_ga.norm(), "delta_thz": op.delta }),
    );
    emit(c, "stability", &t, Some(details), m, out)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &a.common;
    let r = resolve(c, true)?;
    let axes = a
        .axes
        .iter()
        .map(|s| s.parse::<Axis>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut metrics: Vec<Metric> = Vec::new();
    for m in &a.metrics {
        let m = Metric::from(*m);
        if !metrics.contains(&m) {
            metrics.push(m);
        }
    }
    let mut spec = SweepSpec::new(axes, metrics);
    spec.omega_ir = c.omega_ir;
    let res = sweep(r.params.params(), &spec)?;
    let m = RunManifest::new(
        "sweep",
        r.params.params().clone(),
        r.warnings.clone(),
        json!({ "axes": a.axes, "metrics": spec.metrics, "omega_ir_thz": spec.omega_ir }),
    )
    .with_errors(&res.error_summary());
    emit(c, "sweep", &res.to_table(), None, m, out)
}

fn cmd_fig(a: &FigArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &a.common;
    let r = resolve(c, false)?;
    let opts = PresetOptions { points: c.points, reoptimize: a.reoptimize };
    let fig = figure_preset(&a.preset, r.params.params(), opts)?;
    let m = RunManifest::new(
        "fig",
        r.params.params().clone(),
        r.warnings.clone(),
        json!({ "preset": a.preset, "points": c.points, "reoptimize": a.reoptimize }),
    )
    .with_errors(&fig.errors);
    emit(c, &a.preset, &fig.table, None, m, out)
}
