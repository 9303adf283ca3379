use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nevgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nevgame")).args(args).env("NO_COLOR", "1").output().unwrap()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn simulate_prints_only_written_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let o = nevgame(&["simulate", "--config", "paper2021", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let paths: Vec<PathBuf> = String::from_utf8(o.stdout).unwrap().lines().map(PathBuf::from).collect();
    let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
    assert_eq!(names, ["trajectory.csv", "report.json", "manifest.json"]);
    assert!(paths.iter().all(|p| p.is_file()));

    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y\n0,0.135,0.134\n"));
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn malformed_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let unknown = write(dir.path(), "unknown.toml", "id = \"u\"\n[initial]\nx = 0.1\ny = 0.1\n[consumer]\nzeta = 1\n");
    let o = nevgame(&["simulate", "--config", &unknown, "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 6") && err.contains("zeta"), "{err}");
    assert!(o.stdout.is_empty());

    let alpha = write(dir.path(), "alpha.toml", "id = \"a\"\n[initial]\nx = 0.1\ny = 0.1\n[consumer]\nalpha = 1.5\n");
    let o = nevgame(&["classify", "--config", &alpha, "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[0, 1]"));

    let o = nevgame(&["sweep", "--config", &config("paper2021.toml"), "--out", out]);
    assert_eq!(o.status.code(), Some(1), "sweep without [sweep]");

    let o = nevgame(&["simulate", "--config", "no/such/file.toml", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = nevgame(&["predict", "--config", "paper2021", "--out", out.to_str().unwrap(), "--horizons", "1e9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beyond"));
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn usage_errors() {
    assert_eq!(nevgame(&[]).status.code(), Some(1));
    assert_eq!(nevgame(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nevgame(&["--help"]).status.code(), Some(0));
}

#[test]
fn predict_writes_one_row_per_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = nevgame(&["predict", "--config", "paper2021", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("prediction.csv")).unwrap();
    let times: Vec<_> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    assert_eq!(times, ["12", "24", "36"]);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("prediction.json")).unwrap()).unwrap();
    assert_eq!(json["long_run"]["converged"], true);
}

#[test]
fn sweep_writes_table_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = nevgame(&["sweep", "--config", &config("sweep_delta.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("sweep.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        let name = format!("sweep_{i:03}.csv");
        assert_eq!(row["trajectory"], name.as_str());
        assert!(out.join(&name).is_file());
    }
}

#[test]
fn classify_modes_on_shipped_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = nevgame(&["classify", "--config", "paper2021", "--out", out.to_str().unwrap(), "--mode", "paper"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert!(r.as_array().unwrap().iter().all(|e| e["mode"] == "paper"));
}
