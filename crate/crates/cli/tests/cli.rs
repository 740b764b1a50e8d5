use std::path::Path;
use std::process::{Command, Output};

fn zmlab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zmlab"))
        .args(args)
        .env("ZMLAB_CACHE", cache)
        .output()
        .expect("run zmlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn sieve_lists_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = zmlab(&["sieve", "--lo", "10", "--hi", "30"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "11\n13\n17\n19\n23\n29\n");
    let o = zmlab(&["sieve", "--lo", "0", "--hi", "1000000", "--count"], dir.path());
    assert_eq!(stdout(&o).trim(), "78498");
}

#[test]
fn scheme_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = zmlab(
        &["scheme", "--T", "1e12", "--mode", "desk", "--c-p", "5", "--c-omega", "50", "--override", "7.38905609893065,1000"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["Tj"].as_array().unwrap().len(), 2);
    assert_eq!(v["window_prime_counts"][0], 164);

    let o = zmlab(&["scheme", "--T", "1e4", "--mode", "paper"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn zeta_grid_is_cached() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["zeta", "--t-start", "100", "--t-end", "110", "--spacing", "0.05"];
    let first = zmlab(&args, dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stderr(&first).contains("cache miss, 201 evaluations"));
    let second = zmlab(&args, dir.path());
    assert!(stderr(&second).contains("cache hit, 0 evaluations"));
    assert_eq!(stdout(&first), stdout(&second));
    let text = stdout(&first);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,Z,theta");
    assert_eq!(lines.len(), 202);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 1);
}

#[test]
fn coarse_spacing_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = zmlab(&["zeta", "--t-start", "100", "--t-end", "110", "--spacing", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn moments_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = zmlab(&["moment", "--k", "0,1", "--T", "1000"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[0][3] - 1000.0).abs() < 1e-9);
    assert!(rows[1][3] > 1000.0);
    let o = zmlab(&["moment", "--k", "3", "--T", "1000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = zmlab(&["verify", "--suite", "prop1", "--sites", "50", "--seed", "3", "--k", "0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("site_t,case,lhs,rhs,margin,certified"));
    assert_eq!(stdout(&o).lines().count(), 51);
    let again = zmlab(&["verify", "--suite", "prop1", "--sites", "50", "--seed", "3", "--k", "0"], dir.path());
    assert_eq!(stdout(&o), stdout(&again));

    let o = zmlab(&["verify", "--suite", "lemma1", "--sites", "20", "--k", "-1.5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));

    let o = zmlab(&["verify", "--suite", "budget", "--k", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["paper_ladder"]["total"], 1.0);
}

#[test]
fn report_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("lab.json");
    std::fs::write(&cfg, r#"{"T": 1000.0, "k": [0.0, 1.0], "sites": 50, "suites": {"identities": true, "moments": true}}"#)
        .unwrap();
    let o = zmlab(&["--config", cfg.to_str().unwrap(), "report", "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(out.join("moments.csv").exists());
    assert!(out.join("summary.json").exists());
    assert!(stdout(&o).contains("cache: 0 hits, 1 misses"));
    let o = zmlab(&["--config", cfg.to_str().unwrap(), "report", "--out", out.to_str().unwrap()], dir.path());
    assert!(stdout(&o).contains("cache: 1 hits, 0 misses, 0 zeta evaluations"));

    std::fs::write(&cfg, r#"{"T": 1000.0, "suites": {}}"#).unwrap();
    let empty = dir.path().join("empty");
    let o = zmlab(&["--config", cfg.to_str().unwrap(), "report", "--out", empty.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    assert!(!empty.exists());

    std::fs::write(&cfg, r#"{"T": 1000.0, "k": [2.5]}"#).unwrap();
    let o = zmlab(&["--config", cfg.to_str().unwrap(), "report"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
