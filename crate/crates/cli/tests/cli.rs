use std::path::Path;
use std::process::{Command, Output};

fn gbv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbv")).args(args).output().unwrap()
}

fn write_samples(dir: &Path) -> String {
    let path = dir.join("f.csv");
    std::fs::write(&path, "0\n1\n0\n1\n0\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn variation_report_embeds_config_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_samples(dir.path());
    let out = gbv(&["variation", "--input", &input, "--functional", "lambda", "--weights", "harmonic", "--p", "1"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["weights"]["kind"], "harmonic");
    let v = report["result"]["value"].as_f64().unwrap();
    assert!((v - 25.0 / 12.0).abs() < 1e-12);
    assert_eq!(report["result"]["mode"], "exact-oracle");
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("r{i}.json"));
        let p = path.to_str().unwrap();
        let out = gbv(&["inequality", "--suite", "wu", "--samples", "500", "--seed", "7", "--output", p]);
        assert!(out.status.success());
        assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1);
        bodies.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    let jobs = gbv(&["--jobs", "1", "inequality", "--suite", "wu", "--samples", "500", "--seed", "7"]);
    assert_eq!(jobs.stdout, bodies[0]);
}

#[test]
fn criterion_csv_rows() {
    let out = gbv(&[
        "criterion", "--criterion", "lambda-gamma", "--lambda", "harmonic", "--gamma", "constant", "--p", "1",
        "--qn", "linear", "--delta", "pow2", "--ncap", "20", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(text.starts_with("n,q_n,delta_n,a_n,argmax_k,running_sup\n"));
}

#[test]
fn criterion_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"criterion": "schramm",
            "family": {"kind": "scaled", "base": {"power": 2.0}, "weights": {"kind": "harmonic"}},
            "gauge": {"q": {"kind": "constant", "q": 2.0}, "delta": {"kind": "pow2"}},
            "n_cap": 12}"#,
    )
    .unwrap();
    let out = gbv(&["criterion", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["verdict"], "diverging-trend");
}

#[test]
fn exit_codes() {
    let hyp = gbv(&["criterion", "--criterion", "union-p", "--lambda", "harmonic", "--p", "3", "--qn", "constant:2"]);
    assert_eq!(hyp.status.code(), Some(2));
    let missing = gbv(&["variation", "--input", "/nonexistent/f.csv"]);
    assert_eq!(missing.status.code(), Some(1));
    let bad_spec = gbv(&["criterion", "--criterion", "schramm", "--lambda", "nonsense"]);
    assert_eq!(bad_spec.status.code(), Some(1));
    let unknown = gbv(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn infeasible_construction_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inputs.json");
    std::fs::write(
        &path,
        r#"{"setting": {"kind": "schramm",
                        "family": {"kind": "scaled", "base": {"power": 1.0}, "weights": {"kind": "constant"}}},
            "gauge": {"q": {"kind": "linear"}, "delta": {"kind": "pow2"}},
            "levels": 2}"#,
    )
    .unwrap();
    let out = gbv(&["counterexample", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn norm_of_single_jump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"values": [0, 0, 3, 3]}"#).unwrap();
    let out = gbv(&["norm", "--input", path.to_str().unwrap(), "--phi", "power:1", "--weights", "harmonic", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = text.lines().nth(1).unwrap().parse().unwrap();
    assert!((v - 3.0).abs() < 1e-9);
}
