use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hcn-sleep"))
}

fn run_in(dir: &Path, args: &[&str]) -> std::process::Output {
    bin().args(args).arg("--out").arg(dir).output().unwrap()
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["validate-outage", "--trials", "20", "--seed", "7", "--sweep", "w_m:2e6:8e6:3"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    let fa = std::fs::read(a.path().join("outage_w_m.csv")).unwrap();
    let fb = std::fs::read(b.path().join("outage_w_m.csv")).unwrap();
    assert_eq!(fa, fb);
    let text = String::from_utf8(fa).unwrap();
    assert!(text.starts_with("w_m_Hz,G_m,G_m_ci,"));
    assert_eq!(text.lines().count(), 4);

    let c = tempfile::tempdir().unwrap();
    let other = ["validate-outage", "--trials", "20", "--seed", "8", "--sweep", "w_m:2e6:8e6:3"];
    assert!(run_in(c.path(), &other).status.success());
    assert_ne!(text.as_bytes(), std::fs::read(c.path().join("outage_w_m.csv")).unwrap());
}

#[test]
fn empty_sweep_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let out = run_in(d.path(), &["sweep-sleeping", "--sweep", "lambda_s:4e-4:1e-4:5"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");
    assert!(std::fs::read_dir(d.path()).unwrap().next().is_none());
}

#[test]
fn bad_config_reports_json() {
    let d = tempfile::tempdir().unwrap();
    let conf = d.path().join("bad.conf");
    let text = hcn_sleep_cli::config::DEFAULT_CONFIG.replace("eta_m = 0.05", "eta_m = 1.5");
    assert_ne!(text, hcn_sleep_cli::config::DEFAULT_CONFIG);
    std::fs::write(&conf, text).unwrap();
    let out = run_in(d.path(), &["planning", "--config", conf.to_str().unwrap()]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_parameter");
    assert!(err["message"].as_str().unwrap().contains("eta_m"));
}

#[test]
fn sleeping_sweep_writes_rows() {
    let d = tempfile::tempdir().unwrap();
    let out = run_in(
        d.path(),
        &["sweep-sleeping", "--cb", "--scheme", "random", "--sweep", "lambda_s:1e-4:2e-4:2"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d.path().join("sleeping_lambda_s.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], hcn_sleep::optimizer::SOLVE_COLUMNS);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains(",random,true,"));
}

#[test]
fn traffic_and_planning_summaries() {
    let d = tempfile::tempdir().unwrap();
    let out = run_in(d.path(), &["traffic", "--profile", "sine"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("average sleeping ratio"));
    assert_eq!(std::fs::read_to_string(d.path().join("traffic_sine.csv")).unwrap().lines().count(), 97);

    let out = run_in(d.path(), &["planning", "--sweep", "D:500:700:3"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(d.path().join("planning.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn unknown_profile_file_is_io_error() {
    let d = tempfile::tempdir().unwrap();
    let out = run_in(d.path(), &["traffic", "--profile", "/nonexistent/day.csv"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}
