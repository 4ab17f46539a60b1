use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn fontan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fontan")).args(args).output().expect("binary runs")
}

fn run_ode(out: &Path) -> Output {
    let cfg = configs().join("ode_baseline.json");
    fontan(&["ode-run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn ode_run_writes_summary_and_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run_ode(&out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    let sv = summary["stroke_volume"].as_f64().unwrap();
    assert!(sv > 0.05 && sv < 0.08, "{sv}");
    let traj = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(traj.lines().nth(2).unwrap().starts_with("t,phase,Pa"));
    assert!(out.join("pv_loop.csv").is_file());
}

#[test]
fn repeated_runs_have_identical_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_ode(&a).status.success());
    assert!(run_ode(&b).status.success());
    let ma = std::fs::read(a.join("manifest.json")).unwrap();
    assert_eq!(ma, std::fs::read(b.join("manifest.json")).unwrap());
    let m: serde_json::Value = serde_json::from_slice(&ma).unwrap();
    let names: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    assert_eq!(names, ["pv_loop.csv", "summary.json", "trajectory.csv"]);
}

#[test]
fn missing_profile_is_config_error_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"pde": {"topology": "fontan", "profile_file": "nope.csv", "initial_pressure": 5.0,
            "coupling": {"C_ls": 0.01, "C_ld": 0.01}}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = fontan(&["pde-run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.csv"));
    assert!(!out.exists());
}

#[test]
fn bad_override_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fontan(&["ode-run", "--out", out.to_str().unwrap(), "--override", "params.Ca=-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn nonconvergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fontan(&["ode-run", "--out", out.to_str().unwrap(), "--override", "ode.max_cycles=2", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn sweep_overrides_and_cycles_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fontan(&[
        "ode-sweep",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "sweep={\"rp\": [2.0, 3.0, 4.0], \"heart_rates\": [60.0]}",
        "--cycles",
        "5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn unsorted_sweep_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fontan(&["ode-sweep", "--out", out.to_str().unwrap(), "--override", "sweep={\"rp\": [3.0, 2.0], \"heart_rates\": [60.0]}"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analyze_normal_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = configs().join("pde_normal.json");
    let o = fontan(&["analyze", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--cycles", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("analysis.json")).unwrap()).unwrap();
    let domains = a["domains"].as_array().unwrap();
    assert_eq!(domains.len(), 2);
    for d in domains {
        assert!(d["energy"]["violations"].as_array().unwrap().is_empty());
        assert!(d["bounds"]["violations"].as_array().unwrap().is_empty());
    }
    assert!(out.join("boundary_systemic.csv").is_file());
}
