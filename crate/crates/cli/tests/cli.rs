use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn wbl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbl"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("wbl runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Data rows of a CSV with `#` header lines, minus the column line.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn pole_series(n: usize) -> f64 {
    (n + 1..n + 200).rev().map(|k| PI / ((k as f64 + 1.0) * 4f64.powi(k as i32 + 1))).sum::<f64>().sqrt()
}

const POLE: &str = r#"{"domain":{"type":"disc","c":[0,0],"r":1},"weight":{"type":"zero"},"target":"pole:2","n_max":20,"center":[0,0],"scale":1}"#;

#[test]
fn density_scan_matches_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "pole.json", POLE);
    let out = wbl(dir.path(), &["--config", &cfg, "density-scan"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("density_scan.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# config: {")));
    assert!(text.lines().any(|l| l.starts_with("# quad_error_budget: ")));
    let r = rows(&csv);
    assert_eq!(r.len(), 21);
    for (n, row) in r.iter().enumerate() {
        assert_eq!(row[0] as usize, n);
        if n <= 10 {
            let want = pole_series(n);
            assert!((row[1] - want).abs() <= 1e-6 * want, "n = {n}: {} vs {want}", row[1]);
        }
    }
}

#[test]
fn certify_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = wbl(dir.path(), &["certify", "--p", "0.5", "--M", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("certify.json")).unwrap()).unwrap();
    assert!((v["C_1"].as_f64().unwrap() - (10f64.ln() + 1.0 - 0.5 * PI.ln())).abs() < 1e-12);
    assert!((v["C_1"].as_f64().unwrap() - 2.730220).abs() < 1e-6);
    assert!((v["C_p"].as_f64().unwrap() - 2.828427).abs() < 1e-6);
    assert!(v["Y"].as_f64().unwrap() > 1.0);
    assert!(v["epsilon0_sq"].as_f64().unwrap() > 0.0);
    assert_eq!(v["checks"]["gap_samples"].as_u64().unwrap(), 10_000);
    assert_eq!(v["checks"]["poisson"]["samples"].as_u64().unwrap(), 100);
    assert_eq!(v["config"]["certify"]["M"].as_f64().unwrap(), 10.0);
}

#[test]
fn gram_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"domain":{"type":"disc","c":[0,0],"r":1},"n_max":3,"center":[0,0],"scale":1}"#,
    );
    let out = wbl(dir.path(), &["--config", &cfg, "gram"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for row in rows(&dir.path().join("gram.csv")) {
        let (j, k) = (row[0] as usize, row[1] as usize);
        let want = if j == k { PI / (j as f64 + 1.0) } else { 0.0 };
        assert!((row[2] - want).abs() < 1e-12 && row[3].abs() < 1e-12, "G[{j}][{k}] = {}", row[2]);
    }
}

#[test]
fn reruns_are_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = write_config(a.path(), "pole.json", POLE);
    assert!(wbl(a.path(), &["--config", &cfg, "density-scan"]).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_wbl"))
        .args(["--config", &cfg, "density-scan", "--out"])
        .arg(b.path())
        .env("WBL_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let x = std::fs::read(a.path().join("density_scan.csv")).unwrap();
    let y = std::fs::read(b.path().join("density_scan.csv")).unwrap();
    assert_eq!(x, y);
    assert!(wbl(a.path(), &["poisson-check"]).status.success());
    let first = std::fs::read(a.path().join("poisson.json")).unwrap();
    assert!(wbl(a.path(), &["poisson-check"]).status.success());
    assert_eq!(first, std::fs::read(a.path().join("poisson.json")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", r#"{"n_max": 3, "colour": "red"}"#);
    assert_eq!(wbl(dir.path(), &["--config", &bad, "gram"]).status.code(), Some(1));
    let nodomain = write_config(dir.path(), "nd.json", r#"{"n_max": 3}"#);
    assert_eq!(wbl(dir.path(), &["--config", &nodomain, "gram"]).status.code(), Some(1));
    assert_eq!(wbl(dir.path(), &["certify", "--p", "1.5", "--M", "10"]).status.code(), Some(1));
    let heavy = write_config(
        dir.path(),
        "heavy.json",
        r#"{"domain":{"type":"disc","c":[0,0],"r":1},"weight":{"type":"log_potential","atoms":[{"z":[0,0],"alpha":2.5}]},"target":"one","n_max":2}"#,
    );
    assert_eq!(wbl(dir.path(), &["--config", &heavy, "density-scan"]).status.code(), Some(2));
    // a plateau verdict is advisory and leaves the exit code alone
    let moon = write_config(
        dir.path(),
        "moon.json",
        r#"{"domain":{"type":"moon","outer":{"c":[0,0],"r":2},"inner":{"c":[1.3,0],"r":0.7}},"target":"pole:1.3","n_max":12}"#,
    );
    let out = wbl(dir.path(), &["--config", &moon, "density-scan"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("HEURISTIC"));
}

#[test]
fn potential_and_stage_reports() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write_config(dir.path(), "pot.json", r#"{"potential":{"atoms":[{"z":[0,0],"alpha":1.0}]},"quad":{"tol":1e-8}}"#);
    assert!(wbl(dir.path(), &["--config", &pot, "potential-check"]).status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("potential.json")).unwrap()).unwrap();
    assert!((v["integral"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-6);
    assert_eq!(v["holds"], serde_json::Value::Bool(true));

    let st = write_config(dir.path(), "st.json", r#"{"stage":{"k":1,"degree":4}}"#);
    let out = wbl(dir.path(), &["--config", &st, "moon-stage"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("moon_stage.json")).unwrap()).unwrap();
    assert!(v["strip_bound"].as_f64().unwrap() < v["target"].as_f64().unwrap());
}
