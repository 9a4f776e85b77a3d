use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use molopt::model::SystemParams;
use serde_json::Value;

fn molopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molopt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn reference_config(dir: &Path) -> PathBuf {
    write_config(dir, "fig2.json", &serde_json::to_value(SystemParams::reference()).unwrap())
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn steady_reports_enhanced_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_config(dir.path());
    let o = molopt(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o).lines().find(|l| l.starts_with("ga_abs_thz")).unwrap().to_string();
    let ga: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((ga - 2.98).abs() < 0.01, "{line}");
    assert!(stdout(&o).contains("delta_thz"));
}

#[test]
fn fig2a_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = molopt(&["fig", "--preset", "fig2a", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("fig2a.csv")).unwrap();
    let rows = csv_rows(&csv);
    assert_eq!(rows[0], vec!["ga_thz", "tac", "stable", "spectral_abscissa_thz"]);
    assert_eq!(rows.len(), 401);
    let peak = rows[1..]
        .iter()
        .filter(|r| r[2] == "true")
        .max_by(|a, b| a[1].parse::<f64>().unwrap().total_cmp(&b[1].parse::<f64>().unwrap()))
        .unwrap();
    let (g, t): (f64, f64) = (peak[0].parse().unwrap(), peak[1].parse().unwrap());
    assert!((g - 3.48).abs() < 0.07 && (t - 12.0).abs() < 1.5, "peak row {peak:?}");

    let m: Value = serde_json::from_str(&std::fs::read_to_string(out.join("fig2a.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "fig");
    assert_eq!(m["settings"]["preset"], "fig2a");
    assert_eq!(m["outputs"][0], "fig2a.csv");
    assert_eq!(m["params"]["kappa_a"], 30.0);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}

#[test]
fn stability_verdict_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_config(dir.path());
    let o = molopt(&["stability", "--config", cfg.to_str().unwrap(), "--ga", "5.0"]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with("UNSTABLE, spectral abscissa +"), "{first}");
    assert!(first.ends_with(" THz"));
    let o = molopt(&["stability", "--config", cfg.to_str().unwrap(), "--ga", "3.0"]);
    assert!(stdout(&o).starts_with("STABLE, spectral abscissa -"));
}

#[test]
fn config_errors_exit_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = serde_json::to_value(SystemParams::reference()).unwrap();
    v.as_object_mut().unwrap().remove("kappa_a");
    let missing = write_config(dir.path(), "missing.json", &v);
    let o = molopt(&["steady", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kappa_a"), "{}", stderr(&o));

    let mut v = serde_json::to_value(SystemParams::reference()).unwrap();
    v["kappa_b"] = Value::from(1.0);
    let extra = write_config(dir.path(), "extra.json", &v);
    let o = molopt(&["steady", "--config", extra.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field 'kappa_b'"), "{}", stderr(&o));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\n \"nu_b\": 30,\n ]").unwrap();
    let o = molopt(&["steady", "--config", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = molopt(&["steady", "--config", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validation_and_usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = serde_json::to_value(SystemParams::reference()).unwrap();
    v["kappa_c"] = Value::from(-0.5);
    let bad = write_config(dir.path(), "bad.json", &v);
    let o = molopt(&["response", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kappa_c"));

    let o = molopt(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("frobnicate"));

    let cfg = reference_config(dir.path());
    let o = molopt(&["steady", "--config", cfg.to_str().unwrap(), "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--bogus"));

    let o = molopt(&["steady"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--config"));

    let o = molopt(&["fig", "--preset", "fig9"]);
    assert_eq!(o.status.code(), Some(1));

    let o = molopt(&["sweep", "--config", cfg.to_str().unwrap(), "--axis", "zeta:0:1:3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("zeta"));
}

#[test]
fn numeric_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_config(dir.path());
    // No coupling: flat zero spectrum, so no peak to measure.
    let o = molopt(&["bandwidth", "--config", cfg.to_str().unwrap(), "--ga", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("no peak"));
}

#[test]
fn spectrum_of_three_points_has_four_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_config(dir.path());
    let o = molopt(&[
        "spectrum", "--config", cfg.to_str().unwrap(), "--ga", "3.4", "--from", "29", "--to", "31", "--points", "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("omega_ir_thz,tac,pole\n29,"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_config(dir.path());
    let run = |sub: &str, threads: &str| {
        let out = dir.path().join(format!("{sub}-{threads}"));
        let o = molopt(&[
            "sweep", "--config", cfg.to_str().unwrap(), "--axis", "ga:0:5:41", "--axis", "kappa_c:0.2:1:3",
            "--metric", "tac", "--metric", "stability", "--metric", "bandwidth", "--threads", threads, "--out",
            out.to_str().unwrap(), "--json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (
            std::fs::read(out.join("sweep.csv")).unwrap(),
            std::fs::read(out.join("sweep.json")).unwrap(),
            std::fs::read(out.join("sweep.manifest.json")).unwrap(),
        )
    };
    let a = run("a", "1");
    let b = run("b", "4");
    let c = run("c", "4");
    assert_eq!(a, b);
    assert_eq!(b, c);
    let text = String::from_utf8(a.0).unwrap();
    assert_eq!(text.lines().count(), 1 + 41 * 3);
}

#[test]
fn fig4b_blank_bandwidth_where_unstable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = molopt(&["fig", "--preset", "fig4b", "--points", "51", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&std::fs::read_to_string(out.join("fig4b.csv")).unwrap());
    assert_eq!(rows[0], vec!["ga_thz", "bandwidth_thz", "stable"]);
    let mut unstable = 0;
    for r in &rows[1..] {
        if r[2] == "false" {
            unstable += 1;
            assert_eq!(r[1], "");
        }
    }
    assert!(unstable > 0);
}

#[test]
fn overrides_are_recorded_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_config(dir.path());
    let out = dir.path().join("o");
    let o = molopt(&[
        "response", "--config", cfg.to_str().unwrap(), "--ga", "2.5", "--delta", "-29", "--omega-ir", "29.5",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(out.join("response.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["params"]["detuning_mode"]["type"], "prescribed_ga");
    assert_eq!(m["params"]["detuning_mode"]["ga_thz"], 2.5);
    assert_eq!(m["params"]["detuning_mode"]["delta_thz"], -29.0);
    assert_eq!(m["settings"]["omega_ir_thz"], 29.5);
    let rows = csv_rows(&std::fs::read_to_string(out.join("response.csv")).unwrap());
    assert_eq!(rows[1][0], "29.5");
}

#[test]
fn json_output_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_config(dir.path());
    let o = molopt(&["bandwidth", "--config", cfg.to_str().unwrap(), "--ga", "3.4", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let w = v["rows"][0]["bandwidth_thz"].as_f64().unwrap();
    assert!((w - 0.0436).abs() < 0.002);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(molopt(&["--help"]).status.code(), Some(0));
    let o = molopt(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
}
