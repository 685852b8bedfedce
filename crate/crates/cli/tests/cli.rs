use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn curvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn reports(o: &Output) -> Vec<Value> {
    serde_json::from_str::<Value>(&stdout(o))
        .expect("stdout is JSON")
        .as_array()
        .expect("array of reports")
        .clone()
}

const CHECK_IDS: [&str; 16] = [
    "vstatic",
    "trace",
    "traceless",
    "lemma1",
    "decomposition",
    "lemma2",
    "lemma3",
    "theorem2",
    "eq312",
    "eq313",
    "lemma4",
    "okumura",
    "pinching",
    "berger",
    "weyl-identities",
    "integral",
];

#[test]
fn list_shows_mass_bound_and_checks() {
    let o = curvlab(&["list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("schwarzschild  m ∈ (0, 0.19245…) for n=3"), "{text}");
    for id in CHECK_IDS {
        assert!(text.lines().any(|l| l.trim_start().starts_with(id)), "{id} missing");
    }
}

#[test]
fn list_json_is_an_array() {
    let o = curvlab(&["list", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let items = v.as_array().unwrap();
    let checks: Vec<&str> = items
        .iter()
        .filter(|i| i["kind"] == "check")
        .map(|i| i["id"].as_str().unwrap())
        .collect();
    for id in CHECK_IDS {
        assert!(checks.contains(&id));
    }
    let s = items.iter().find(|i| i["id"] == "schwarzschild").unwrap();
    let b3 = s["mass_bounds"][0]["bound"].as_f64().unwrap();
    assert!((b3 - (1.0f64 / 27.0).sqrt()).abs() < 1e-15);
}

#[test]
fn hemisphere_vstatic_passes() {
    let o = curvlab(&["verify", "--space", "hemisphere", "--n", "3", "--checks", "vstatic"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = &reports(&o)[0];
    assert_eq!(r["check"], "vstatic");
    assert_eq!(r["pass"], true);
    assert!(r["max_abs"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn schwarzschild_theorem2_passes() {
    let o = curvlab(&[
        "verify", "--space", "schwarzschild", "--n", "3", "--m", "0.1", "--checks", "theorem2", "--grid", "64",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = &reports(&o)[0];
    assert_eq!(r["points"], 64 * 8 * 8);
    assert!(r["max_rel"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn cylinder_saturates_inequalities() {
    let o = curvlab(&["verify", "--space", "cylinder", "--n", "4", "--checks", "okumura,pinching"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rs = reports(&o);
    assert_eq!(rs.len(), 2);
    for r in rs {
        assert!(r["min_value"].as_f64().unwrap().abs() <= 1e-6);
        assert!(r["max_value"].as_f64().unwrap().abs() <= 1e-6);
    }
}

#[test]
fn failing_check_exits_one_and_lists_points() {
    let o = curvlab(&[
        "verify", "--space", "schwarzschild", "--m", "0.1", "--checks", "vstatic", "--backend", "fd", "--fd-step",
        "0.02", "--grid", "8", "--fiber", "2",
    ]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("FAIL schwarzschild n=3 vstatic"));
    assert!(err.contains("vstatic #0 x=("));
    assert!(err.contains("... and 8 more"));
    assert_eq!(reports(&o)[0]["pass"], false);
}

#[test]
fn invalid_arguments_exit_two() {
    for args in [
        vec!["verify", "--space", "torus"],
        vec!["verify", "--space", "hemisphere", "--checks", "theorem7"],
        vec!["verify", "--space", "hemisphere", "--n", "3", "--checks", "eq312"],
        vec!["verify", "--space", "perturbed_flat", "--checks", "vstatic"],
        vec!["verify", "--space", "hemisphere", "--m", "0.1"],
        vec!["verify", "--space", "schwarzschild", "--n", "3", "--m", "0.3"],
        vec!["verify", "--space", "hemisphere", "--out", "report.txt"],
        vec!["verify", "--space", "hemisphere", "--bogus"],
        vec!["verify"],
    ] {
        let o = curvlab(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "verify".to_string(),
            "--space".into(),
            "perturbed_flat".into(),
            "--checks".into(),
            "lemma4,okumura".into(),
            "--grid".into(),
            "6".into(),
            "--fiber".into(),
            "3".into(),
            "--random-points".into(),
            "10".into(),
            "--out".into(),
            dir.path().join(out).to_string_lossy().into_owned(),
        ]
    };
    for name in ["a.json", "b.json", "a.csv", "b.csv"] {
        let a = args(name);
        let o = curvlab(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.csv"), read("b.csv"));
    let csv = String::from_utf8(read("a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.contains(",6x3x3+10@42,"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    fs::write(
        &cfg,
        r#"{"space": "schwarzschild", "n": 4, "m": 0.1, "checks": ["vstatic", "trace"], "grid": 4, "fiber": 2, "timings": true}"#,
    )
    .unwrap();
    let o = curvlab(&["verify", "--config", cfg.to_str().unwrap(), "--n", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rs = reports(&o);
    assert_eq!(rs.len(), 2);
    assert_eq!(rs[0]["n"], 3);
    assert_eq!(rs[0]["grid"], "4x2x2");
    assert!(rs[0]["runtime_ms"].is_u64());
}

#[test]
fn mass_sweep_all_pass() {
    let o = curvlab(&["sweep", "--space", "schwarzschild", "--n", "3", "--m", "0.02:0.18:9", "--check", "vstatic"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(&header[header.len() - 2], "r1");
    assert_eq!(&header[header.len() - 1], "r2");
    let pass = header.iter().position(|h| h == "pass").unwrap();
    let records: Vec<_> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 9);
    assert!(records.iter().all(|r| &r[pass] == "true"));
}

#[test]
fn sweep_beyond_bound_cites_interval() {
    let o = curvlab(&["sweep", "--space", "schwarzschild", "--n", "3", "--m", "0.02:0.25:4", "--check", "vstatic"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("admissible interval is (0, 0.19245"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn root_sweep_is_monotone() {
    let o = curvlab(&["sweep", "--space", "schwarzschild", "--n", "3", "--m", "0.01:0.19:12", "--check", "roots"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let roots: Vec<(f64, f64)> = rows
        .records()
        .map(|r| {
            let r = r.unwrap();
            let n = r.len();
            (r[n - 2].parse().unwrap(), r[n - 1].parse().unwrap())
        })
        .collect();
    assert_eq!(roots.len(), 12);
    for w in roots.windows(2) {
        assert!(w[1].0 > w[0].0 && w[1].1 < w[0].1);
    }
    assert!(roots.iter().all(|(a, b)| a < b));
}

fn integrate(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["integrate", "--json"];
    all.extend_from_slice(args);
    let o = curvlab(&all);
    (code(&o), serde_json::from_str(&stdout(&o)).unwrap_or(Value::Null))
}

#[test]
fn divergence_integrals_vanish() {
    let (c, v) = integrate(&["--space", "hemisphere", "--n", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["pass"], true);
    let (c, v) = integrate(&["--space", "schwarzschild", "--n", "3", "--m", "0.1"]);
    assert_eq!(c, 0);
    assert_eq!(v["pass"], true);
    assert!(v["relative"].as_f64().unwrap() <= 1e-4);
    assert_eq!(v["order"], 32);
}

#[test]
fn cylinder_bochner_rhs_integrates_to_zero() {
    let (c, v) = integrate(&["--space", "cylinder", "--n", "3", "--integrand", "eq313_rhs"]);
    assert_eq!(c, 0);
    assert!(v["value"].as_f64().unwrap().abs() <= 1e-6);
    assert!(v["pass"].is_null());
}

#[test]
fn integrate_needs_warped_product() {
    let o = curvlab(&["integrate", "--space", "product_spheres", "--n", "4"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not a warped product"));
}
