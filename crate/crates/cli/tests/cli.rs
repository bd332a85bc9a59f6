use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn holo(args: &[&str], env_root: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_holo"));
    cmd.args(args).env_remove("HOLO_OUTPUT_ROOT");
    if let Some(root) = env_root {
        cmd.env("HOLO_OUTPUT_ROOT", root);
    }
    cmd.output().expect("binary runs")
}

fn status(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().last().expect("status line");
    serde_json::from_str(line).expect("status is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn dataset_to_stdout_is_plain_csv() {
    let out = holo(&["dataset", "circle", "--n", "4"], None);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("re,im,t\n"));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("\"status\":\"ok\""));
}

#[test]
fn train_attack_render_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s30.csv");
    let out = holo(&["dataset", "circle", "--n", "30", "--out", p(&data)], None);
    assert!(out.status.success());
    let model = dir.path().join("model");
    let out = holo(
        &["train", "--data", p(&data), "--k", "30", "--c", "1", "--out", p(&model)],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let s = status(&out);
    assert_eq!(s["result"]["margins"].as_array().unwrap().len(), 30);
    let coeffs = model.join("coefficients.csv");
    let meta = model.join("model.json");

    let out = holo(
        &[
            "attack", "--coeffs", p(&coeffs), "--meta", p(&meta), "--z", "0.9945,0.1045", "--t", "1", "--radius",
        ],
        None,
    );
    assert!(out.status.success());
    let r = status(&out)["result"]["radius"].as_f64().unwrap();
    assert!(r > 0.0 && r < 0.2, "{r}");

    let png = dir.path().join("range.png");
    let csv = dir.path().join("range.csv");
    let out = holo(
        &[
            "render", "--coeffs", p(&coeffs), "--meta", p(&meta), "--style", "range", "--size", "64", "--out",
            p(&png), "--csv", p(&csv),
        ],
        None,
    );
    assert!(out.status.success());
    assert!(status(&out)["result"]["axis_crossings"].as_u64().unwrap() > 2);
    assert_eq!(&std::fs::read(&png).unwrap()[1..4], b"PNG");
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("theta,re,im"));
}

#[test]
fn project_reports_branch_point_growth() {
    let out = holo(&["project", "--k", "256"], None);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let s: Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    let im = s["result"]["value_at_0.999i"]["im"].as_f64().unwrap();
    assert!(im.abs() > 1.5, "{im}");
}

#[test]
fn basis_writes_tuning_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let tuning = dir.path().join("sigma.csv");
    let out = holo(&["basis", "--k", "5", "--tuning", p(&tuning)], None);
    assert!(out.status.success());
    let ev = status(&out)["result"]["tuning_eigenvalues"].clone();
    assert_eq!(ev.as_array().unwrap().len(), 5);
    assert!(std::fs::read_to_string(&tuning).unwrap().contains("j,k,re,im"));
}

#[test]
fn pde_with_unit_source() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("one.csv");
    std::fs::write(&data, "re,im,t\n0.5,0,1\n").unwrap();
    let out = holo(&["pde", "--data", p(&data), "--family", "unit", "--resolution", "65"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let rel = status(&out)["result"]["residual"]["max_rel"].as_f64().unwrap();
    assert!(rel <= 5e-2);
}

#[test]
fn normality_memorizer() {
    let out = holo(&["normality", "--rule", "memorizer", "--schedule", "10,20", "--reference", "20"], None);
    assert!(out.status.success());
    let rows = status(&out)["result"]["report"]["rows"].clone();
    for r in rows.as_array().unwrap() {
        assert!(r[1].as_f64().unwrap() >= 1.0);
    }
}

#[test]
fn experiment_bundle_under_env_root_is_deterministic() {
    let root = tempfile::tempdir().unwrap();
    let args = ["experiment", "fig1", "--k", "1", "--probes", "8", "--size", "64"];
    // a single constant feature cannot reproduce the figure's orderings:
    // the run completes, writes its bundle and reports the failed checks
    let out = holo(&args, Some(root.path()));
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(status(&out)["stage"], "checks");
    let dir = root.path().join("fig1");
    let mut first: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    first.sort();
    let bytes: Vec<Vec<u8>> = first.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert!(first.iter().any(|p| p.extension().is_some_and(|e| e == "png")));
    assert!(dir.join("fig1_config.json").exists());
    let out = holo(&args, Some(root.path()));
    assert_eq!(out.status.code(), Some(1));
    let again: Vec<Vec<u8>> = first.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(bytes, again);
}

#[test]
fn failures_are_json_with_nonzero_exit() {
    let out = holo(&["experiment", "fig1", "--c=-1"], None);
    assert_eq!(out.status.code(), Some(2));
    let s = status(&out);
    assert_eq!(s["status"], "error");
    assert_eq!(s["stage"], "config");

    let out = holo(&["experiment", "nonsense"], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(status(&out)["status"], "error");

    let out = holo(&["dataset", "torus"], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(status(&out)["status"], "error");

    let out = holo(&["train", "--data", "/nonexistent.csv", "--out", "/tmp/x"], None);
    assert!(!out.status.success());
    assert!(status(&out)["error"].as_str().unwrap().contains("nonexistent"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "normality", "normality": {"k": 5, "c": 1.0, "schedule": [10, 20], "reference": 40}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("bundle");
    let out = holo(
        &["experiment", "normality", "--config", p(&cfg), "--seed", "7", "--out", p(&out_dir)],
        None,
    );
    let echo: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("normality_config.json")).unwrap()).unwrap();
    assert_eq!(echo["seed"], 7);
    assert_eq!(echo["normality"]["reference"], 40);
    // the bundle exists whether or not the checks pass
    assert!(out.status.code().is_some());
}
