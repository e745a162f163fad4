use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sepalab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepalab"))
        .args(args)
        .env_remove("SEPALAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn nosignal_example() {
    let out = sepalab(&["nosignal", "--qubits", "2", "--trials", "50", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_stdout(&out);
    assert_eq!(report["experiment"], "nosignal");
    assert_eq!(report["seed"], 7);
    assert_eq!(report["passed"], true);
    assert!(report["result"]["max_delta"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["result"]["trials"].as_array().unwrap().len(), 50);
}

#[test]
fn chsh_example() {
    let out = sepalab(&["chsh", "--state", "bell:phi+", "--angles", "0,1.5708,0.7854,-0.7854"]);
    assert_eq!(code(&out), 0);
    let s = json_stdout(&out)["result"]["S"].as_f64().unwrap();
    assert!((s - 2.0 * 2f64.sqrt()).abs() <= 1e-9, "S = {s}");
}

#[test]
fn lightcone_example_csv() {
    let out = sepalab(&[
        "lightcone", "--sites", "6", "--layers", "3", "--disturb", "0", "--model", "ising:J=1,g=1", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv_rows(&text);
    let header = rows.remove(0);
    assert_eq!(header, ["site", "layer", "delta", "in_cone"]);
    assert_eq!(rows.len(), 6 * 4);
    for row in &rows {
        let delta: f64 = row[2].parse().unwrap();
        if row[3] == "false" {
            assert!(delta <= 1e-12, "{row:?}");
        }
    }
    let d11 = rows.iter().find(|r| r[0] == "1" && r[1] == "1").unwrap();
    assert!(d11[2].parse::<f64>().unwrap() > 1e-3);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn property_violation_exits_one() {
    let out = sepalab(&["nosignal", "--trials", "3", "--tol-eq", "1e-300"]);
    assert_eq!(code(&out), 1);
    let summary: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(summary["status"], "fail");
    assert_eq!(json_stdout(&out)["passed"], false);

    let out = sepalab(&["validate", "--channel", "toy-collapse"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["chsh", "--angles", "0,1,2"],
        vec!["lightcone", "--model", "potts"],
        vec!["nosignal", "--format", "xml"],
        vec!["evolve", "--dt", "0"],
        vec!["frobnicate"],
        vec!["chsh", "--seed", "minus-one"],
    ] {
        let out = sepalab(&args);
        assert_eq!(code(&out), 2, "{args:?}");
    }
    let out = sepalab(&["lightcone", "--model", "potts"]);
    let err: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(err["kind"], "usage");
}

#[test]
fn capacity_errors_exit_three() {
    let out = sepalab(&["lightcone", "--sites", "13"]);
    assert_eq!(code(&out), 3);
    let err: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(err["kind"], "capacity");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sepalab"))
        .args(["chsh", "--format", "json"])
        .env("SEPALAB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("chsh.json")).unwrap()).unwrap();
    assert_eq!(written["experiment"], "chsh");

    let explicit = dir.path().join("deep").join("lc.csv");
    let out = sepalab(&["lightcone", "--layers", "1", "--format", "csv", "--out", explicit.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(&explicit).unwrap().starts_with("site,layer,delta,in_cone"));
}

#[test]
fn toml_config_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "experiment = \"nosignal\"\nseed = 5\ntrials = 20\nqubits = 3\n").unwrap();
    let out = sepalab(&["nosignal", "--config", cfg.to_str().unwrap(), "--trials", "8"]);
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["config"]["trials"], 8);
    assert!(report["result"]["trials"].as_array().unwrap().iter().all(|t| t["n_qubits"] == 3));

    let out = sepalab(&["chsh", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let missing = sepalab(&["chsh", "--config", "/nonexistent/run.toml"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn sequential_flag_gives_identical_reports() {
    let strip = |out: &Output| {
        let mut v = json_stdout(out);
        v.as_object_mut().unwrap().remove("generated_at");
        v.to_string()
    };
    let a = sepalab(&["detect", "--trials", "40", "--seed", "3"]);
    let b = sepalab(&["detect", "--trials", "40", "--seed", "3", "--sequential"]);
    assert_eq!(code(&a), 0);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn detect_and_evolve_defaults_pass() {
    let out = sepalab(&["detect"]);
    assert_eq!(code(&out), 0);
    let v = json_stdout(&out);
    assert_eq!(v["result"]["verdict"]["signals"], true);
    assert!(v["result"]["verdict"]["max_delta"].as_f64().unwrap() >= 0.1);

    let out = sepalab(&["detect", "--channel", "amplitude-damping:0.5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_stdout(&out)["result"]["verdict"]["signals"], false);

    let out = sepalab(&["evolve", "--sites", "3", "--time", "0.5"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn validate_reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"kind":"pure","dims":[2],"entries":[[1,0],[0,0]]}"#).unwrap();
    let out = sepalab(&["validate", "--state", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"density","dims":[2],"entries":[[1,0],[0.5,0],[0,0],[0,0]]}"#).unwrap();
    let out = sepalab(&["validate", "--state", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(!Path::new(&dir.path().join("validate.json")).exists());
}

#[test]
fn version_and_help() {
    let out = sepalab(&["--version"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(code(&sepalab(&["--help"])), 0);
}
