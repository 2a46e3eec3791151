use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hardy(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HARDY_OUTPUT_ROOT")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn exponents_prints_closed_forms() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("e");
    let o = hardy(&["exponents", "--mu", "0.1875", "--dim", "2", "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["alpha_plus"], 0.75);
    assert_eq!(v["alpha_minus"], 0.25);
    assert!((v["q_crit"].as_f64().unwrap() - 11.0 / 3.0).abs() < 1e-12);
    let r = report(&out);
    assert_eq!(r["operation"], "exponents");
    assert_eq!(r["config"]["physics"]["mu"], 0.1875);
}

#[test]
fn validation_failures_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hardy(&["exponents", "--mu", "0.3"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"physics": {"q": 0.5}}"#).unwrap();
    let o = hardy(&["linear", "--config", bad.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "validation");
    fs::write(&bad, "{not json").unwrap();
    let o = hardy(&["linear", "--config", bad.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = hardy(&["verify-all", "--criteria", "13"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn linear_reports_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"domain": {"kind": "disk", "radius": 1.0, "resolution": 24},
            "data": {"tau_atoms": [{"point": [0.2, 0.1], "mass": 1.0}]}}"#,
    )
    .unwrap();
    // Same relative output path from two working directories, so the configs match too.
    let mut texts = Vec::new();
    for run in ["a", "b"] {
        let cwd = tmp.path().join(run);
        fs::create_dir(&cwd).unwrap();
        let o = hardy(&["linear", "--config", cfg.to_str().unwrap(), "--out", "out"], &cwd);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let out = cwd.join("out");
        texts.push(fs::read(out.join("report.json")).unwrap());
        let csv = fs::read_to_string(out.join("weak_residuals.csv")).unwrap();
        assert!(csv.starts_with("test_function,lhs,rhs,relative"));
        assert_eq!(csv.lines().count(), 4);
        assert!(fs::read_to_string(out.join("solution.csv")).unwrap().starts_with("x,y,delta,u,green,martin"));
    }
    assert_eq!(texts[0], texts[1]);
    let r = report(&tmp.path().join("a/out"));
    assert_eq!(r["config"]["domain"]["resolution"], 24);
    assert_eq!(r["config"]["run"]["levels"], 24);
}

#[test]
fn output_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hardy"))
        .args(["trace", "--resolution", "24"])
        .env("HARDY_OUTPUT_ROOT", tmp.path())
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("trace");
    assert_eq!(report(&dir)["result"]["verdict"], "trace_equals_candidate");
    assert!(fs::read_to_string(dir.join("trace.csv")).unwrap().starts_with("beta,mass,nu"));
}

#[test]
fn critical_scan_flips_at_the_critical_exponent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"domain": {"lateral": 128}, "run": {"levels": 8}}"#).unwrap();
    let out = tmp.path().join("scan");
    let o = hardy(
        &[
            "critical-scan",
            "--config",
            cfg.to_str().unwrap(),
            "--mu",
            "0.1875",
            "--q",
            "2,4",
            "--resolution",
            "32",
            "--out",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(out.join("critical_scan.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["q", "subcritical", "j_growth", "trace_retention", "verdict"]);
    let verdicts: Vec<String> = r.records().map(|x| x.unwrap()[4].to_string()).collect();
    assert_eq!(verdicts, ["exists", "removable"]);
}

#[test]
fn verify_all_writes_the_acceptance_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = hardy(
        &["verify-all", "--preset", "smoke", "--criteria", "5,7", "--out", out.to_str().unwrap()],
        tmp.path(),
    );
    let code = o.status.code().unwrap();
    let r = report(&out);
    let passed = r["result"]["passed"].as_bool().unwrap();
    assert_eq!(code, if passed { 0 } else { 4 });
    assert_eq!(r["result"]["criteria"].as_array().unwrap().len(), 2);
    let csv = fs::read_to_string(out.join("acceptance.csv")).unwrap();
    assert!(csv.starts_with("id,title,criterion_passed,check,value,target,check_passed"));
}
