//! End-to-end tests against the compiled binary: exit codes, emitted
//! files, and reproducibility of the artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use backscatter_core::config::{
    ConfigFile, DecayConfig, DipolesConfig, DrivenFieldConfig, FieldsConfig, LevelsConfig,
    MediumConfig, Quantity, SchemeConfig, SignalFieldConfig,
};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backscatter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn q(value: f64, unit: &str) -> Quantity {
    Quantity::new(value, unit)
}

fn driven(rabi: f64) -> DrivenFieldConfig {
    DrivenFieldConfig { rabi: Some(q(rabi, "rad/s")), phase: None, detuning: None }
}

fn config(e_c: f64, e_d: f64, density_m3: f64, doppler: f64, length_m: f64) -> ConfigFile {
    ConfigFile {
        scheme: SchemeConfig {
            variant: "double-lambda".into(),
            levels: Some(LevelsConfig {
                a: q(2.4e15, "rad/s"),
                c: q(e_c, "rad/s"),
                d: q(e_d, "rad/s"),
            }),
            transitions: None,
            decay: DecayConfig {
                a: Some(q(3.8e7, "rad/s")),
                d: Some(q(1e6, "rad/s")),
                ..Default::default()
            },
            dephasing: Default::default(),
            dipoles: DipolesConfig {
                d1: Some(q(2e-29, "C*m")),
                d2: Some(q(2e-29, "C*m")),
                d3: Some(q(2e-29, "C*m")),
                d4: Some(q(2e-29, "C*m")),
            },
            branching: None,
        },
        fields: FieldsConfig {
            f1: driven(1e3),
            f2: driven(1e7),
            f3: driven(1e5),
            f4: SignalFieldConfig::default(),
        },
        medium: MediumConfig {
            density: q(density_m3, "m^-3"),
            doppler_width: Some(q(doppler, "rad/s")),
            radiative_rate: q(3.8e7, "rad/s"),
            length: q(length_m, "m"),
        },
    }
}

/// Small cell with negligible signal self-absorption; the propagate and
/// scan smoke targets.
fn small_cell(dir: &Path) -> String {
    let path = dir.join("cell.json");
    fs::write(&path, serde_json::to_string_pretty(&config(1.9e11, 3.0e11, 1.4e16, 3.8e7, 1e-5)).unwrap())
        .unwrap();
    path.to_str().unwrap().to_string()
}

/// Dense medium with a near-degenerate signal pair; the planner finds a
/// matched detuning well inside the transparency window.
fn plannable(dir: &Path) -> String {
    let path = dir.join("plan.json.cfg");
    fs::write(&path, serde_json::to_string_pretty(&config(1e9, 3.01e11, 1e18, 6.6e7, 0.01)).unwrap())
        .unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap_or_else(|e| panic!("{path:?}: {e}"))).unwrap()
}

#[test]
fn scenario_writes_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["scenario", "Rb", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = read_json(&dir.path().join("scenario_Rb.json"));
    assert_eq!(report["preset"], "Rb");
    assert_eq!(report["density_matches"], Value::Bool(true));
    assert!(report["plan"]["feasible"].as_bool().unwrap());
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["command"], "scenario");
    assert_eq!(manifest["preset"], "Rb");
    let text = stdout(&out);
    assert!(text.contains("density"), "report text missing density line:\n{text}");
}

#[test]
fn scenario_runs_are_bitwise_reproducible() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = run(&["scenario", "NO_vibrational", "--out", d.path().to_str().unwrap()]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    for name in ["scenario_NO_vibrational.json", "manifest.json"] {
        let a = fs::read(d1.path().join(name)).unwrap();
        let b = fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn unknown_scenario_exits_2_and_lists_presets() {
    let out = run(&["scenario", "bogus"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("Rb") && err.contains("NO_rotational"), "stderr: {err}");
}

#[test]
fn plan_feasible_writes_plan_and_figures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = plannable(dir.path());
    let out = run(&["plan", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let plan = read_json(&dir.path().join("plan.json"));
    assert!(plan["feasible"].as_bool().unwrap(), "plan: {plan}");
    let delta = plan["delta_star"].as_f64().unwrap();
    assert!(delta < 0.0, "matched detuning {delta} not negative");
    for name in
        ["dispersion_curve.csv", "envelope_curve.csv", "backward_contrast.csv", "manifest.json"]
    {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    assert!(stdout(&out).contains("delta_star"), "stdout: {}", stdout(&out));
}

#[test]
fn plan_infeasible_exits_3_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thin.json");
    // Thin medium: the dispersive bend cannot reach the backward matching
    // value anywhere inside the window.
    fs::write(&path, serde_json::to_string(&config(1e9, 3.01e11, 1e10, 6.6e7, 0.01)).unwrap())
        .unwrap();
    let out = run(&[
        "plan",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    let plan = read_json(&dir.path().join("plan.json"));
    assert_eq!(plan["feasible"], Value::Bool(false));
    assert!(!plan["reason"].as_str().unwrap().is_empty());
    assert!(dir.path().join("dispersion_curve.csv").is_file());
}

#[test]
fn plan_without_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["plan", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--config"), "stderr: {}", stderr(&out));
}

#[test]
fn config_parse_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{not json").unwrap();
    let out = run(&["steady-state", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

#[test]
fn steady_state_emits_elements() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_cell(dir.path());
    let out = run(&["steady-state", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("steady_state.csv")).unwrap();
    assert!(csv.starts_with("element,re,im"), "header: {}", csv.lines().next().unwrap());
    assert!(csv.contains("rho_cb"), "csv:\n{csv}");
    assert!(stdout(&out).contains("populations"), "stdout: {}", stdout(&out));
}

#[test]
fn dispersion_scan_respects_grid_and_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_cell(dir.path());
    let out = run(&[
        "dispersion-scan",
        "--config",
        &cfg,
        "--grid",
        "64",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("dispersion_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 65, "header + 64 samples");
    let samples = read_json(&dir.path().join("dispersion_scan.json"));
    assert_eq!(samples.as_array().unwrap().len(), 64);
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["grid"], 64);
    assert_eq!(manifest["format"], "json");
}

#[test]
fn propagate_emits_profiles_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_cell(dir.path());
    let out = run(&["propagate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("profiles.csv")).unwrap();
    assert_eq!(csv.lines().count(), 514, "header + 513 nodes at the default grid");
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary["nz"], 512);
    assert!(summary["omega4_out_abs"].as_f64().unwrap() > 0.0);
    assert!(summary["validity"].as_array().unwrap().len() >= 2);
}

#[test]
fn sweep_emits_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_cell(dir.path());
    let out = run(&[
        "sweep",
        "--param",
        "medium.density",
        "--start",
        "1e15",
        "--stop",
        "2e16",
        "--count",
        "5",
        "--pipeline",
        "dispersion-scan",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6, "header + 5 rows:\n{csv}");
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["sweep"]["path"], "medium.density");
    assert_eq!(manifest["sweep"]["count"], 5);
}

#[test]
fn sweep_rejects_unknown_parameter_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_cell(dir.path());
    let out = run(&[
        "sweep",
        "--param",
        "medium.bogus",
        "--start",
        "1",
        "--stop",
        "2",
        "--pipeline",
        "dispersion-scan",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("medium.density"), "stderr lists paths: {}", stderr(&out));
}
