use std::fs;
use std::process::Command;

use serde_json::Value;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
}

fn write_config(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn list_has_eleven_rows() {
    let out = lab().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().any(|l| l.starts_with("converge")));
    assert!(text.lines().any(|l| l.starts_with("metric-path")));
}

#[test]
fn levi_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario":"levi","knobs":{"samples":8}}"#);
    let mut csvs = Vec::new();
    for (sub, seed) in [("a", "3"), ("b", "3"), ("c", "4")] {
        let out = dir.path().join(sub);
        let st = lab()
            .args(["levi", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--seed", seed])
            .env("BERGMAN_LAB_THREADS", "1")
            .output()
            .unwrap();
        assert!(st.status.success());
        csvs.push(fs::read(out.join("levi.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_ne!(csvs[0], csvs[2]);
}

#[test]
fn echoed_config_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario":"classify-eta","knobs":{"eta":{"kind":"power_law","c":1.0,"alpha":3.0,"r0":0.5},"expect":"divergent"}}"#,
    );
    let first = dir.path().join("first");
    assert!(lab()
        .args(["classify-eta", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&first)
        .output()
        .unwrap()
        .status
        .success());
    let report: Value =
        serde_json::from_slice(&fs::read(first.join("classify-eta.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["summary"]["verdict"], "divergent");
    let echo = write_config(&dir.path().join("first"), &report["config"].to_string());
    let second = dir.path().join("second");
    assert!(lab()
        .args(["classify-eta", "--config"])
        .arg(&echo)
        .arg("--out")
        .arg(&second)
        .output()
        .unwrap()
        .status
        .success());
    assert_eq!(
        fs::read(first.join("classify-eta.csv")).unwrap(),
        fs::read(second.join("classify-eta.csv")).unwrap()
    );
    assert_eq!(
        fs::read(first.join("classify-eta.json")).unwrap(),
        fs::read(second.join("classify-eta.json")).unwrap()
    );
}

#[test]
fn failed_check_exits_nonzero_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario":"classify-eta","knobs":{"expect":"convergent"}}"#,
    );
    let st = lab()
        .args(["classify-eta", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(1));
    let report: Value =
        serde_json::from_slice(&fs::read(dir.path().join("classify-eta.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], Value::Bool(false));
}

#[test]
fn gap_bounds_scenario_writes_seven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let st = lab()
        .args(["appendix-verify", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(st.status.success());
    let csv = fs::read_to_string(dir.path().join("appendix-verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.starts_with("j,t_j,"));
}

#[test]
fn usage_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "converge",
            r#"{"knobs":{"schedule":[0.1,0.2]}}"#,
            "knobs.schedule",
        ),
        ("kernel", r#"{"knobs":{"depth":"deep"}}"#, "knobs.depth"),
        ("kernel", r#"{"knobs":{"depht":9}}"#, "knobs"),
        ("kernel", r#"{"scenario":"levi"}"#, "scenario"),
    ];
    for (scenario, body, path) in cases {
        let cfg = write_config(dir.path(), body);
        let out = lab()
            .arg(scenario)
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{body}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(path), "{body}: {err}");
    }
    let out = lab()
        .args(["nope", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = lab()
        .arg("kernel")
        .arg("--out")
        .arg(dir.path())
        .env("BERGMAN_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
