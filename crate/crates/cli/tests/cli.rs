use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdesign"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn check_schema(name: &str, value: &Value) {
    if let Err(e) = schema(name).validate(value) {
        panic!("{name} output violates its schema: {e}");
    }
}

/// Runs a command that prints its envelope to stdout, validates it and returns it.
fn json(command: &str, args: &[&str]) -> Value {
    let dir = TempDir::new().unwrap();
    let mut full = vec![command];
    full.extend_from_slice(args);
    let out = run_in(dir.path(), &full);
    assert!(out.status.success(), "{full:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    check_schema(command, &v);
    assert_eq!(v["command"], command);
    v
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn exact_design_passes_every_order() {
    for t in ["1", "2", "3"] {
        let v = json("design-test", &["--ensemble", "exact3", "--t", t, "--radius", "1.0"]);
        assert!(f(&v["result"]["report"]["epsilon"]) <= 1e-9);
        assert_eq!(v["result"]["report"]["n_states"], 1000);
        assert_eq!(v["config"]["t"], t.parse::<u64>().unwrap());
    }
}

#[test]
fn approximate_design_sits_on_the_threshold() {
    let v = json("design-test", &["--ensemble", "approx2", "--t", "2", "--radius", "1.0"]);
    assert!((f(&v["result"]["report"]["epsilon"]) - 0.5).abs() <= 0.01);
}

#[test]
fn noisy_design_radius_search() {
    let v = json("design-test", &["--ensemble", "exact3", "--t", "2", "--noise", "stepwise", "--p", "0.06", "--search-radius"]);
    assert_eq!(v["result"]["report"]["epsilon"], "inf");
    let r = f(&v["result"]["search"]["radius"]);
    assert!((r - 0.68).abs() <= 0.02, "{r}");
}

#[test]
fn passing_fraction_flag() {
    let v = json("design-test", &["--ensemble", "approx2", "--t", "1", "--fraction", "--cube-points", "8"]);
    assert_eq!(f(&v["result"]["fraction"]["fraction"]), 1.0);
}

#[test]
fn design_test_on_reconstructed_channels() {
    let v = json("design-test", &["--ensemble", "exact3", "--t", "2", "--tomography", "--shots", "20000", "--seed", "3", "--radius", "0.8"]);
    let eps = f(&v["result"]["report"]["epsilon"]);
    assert!(eps > 0.0 && eps < 0.5, "{eps}");
    assert!(f(&v["result"]["tomography"]["min"]) > 0.99);
}

#[test]
fn per_state_csv() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["design-test", "--ensemble", "approx2", "--csv", "eps.csv", "--output", "r.json"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("eps.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,epsilon"));
    assert_eq!(lines.count(), 1000);
    check_schema("design-test", &read(&dir.path().join("r.json")));
}

#[test]
fn sweeps_agree_between_orders() {
    let dir = TempDir::new().unwrap();
    for t in ["1", "2", "3"] {
        let out = run_in(
            dir.path(),
            &["sweep", "--model", "stepwise", "--t", t, "--p-points", "21", "--csv", &format!("t{t}.csv"), "--output", &format!("t{t}.json")],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        check_schema("sweep", &read(&dir.path().join(format!("t{t}.json"))));
    }
    let rows = |t: &str| -> Vec<Vec<String>> {
        std::fs::read_to_string(dir.path().join(format!("t{t}.csv")))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    };
    let round = |s: &str| match s.parse::<f64>() {
        Ok(x) if x.is_finite() => format!("{x:.6}"),
        _ => s.to_string(),
    };
    let (one, two, three) = (rows("1"), rows("2"), rows("3"));
    assert_eq!(two.len(), 6 * 21);
    for row in &one {
        assert!(row[4].parse::<f64>().unwrap() <= 1e-9);
    }
    for (a, b) in two.iter().zip(&three) {
        assert_eq!(round(&a[4]), round(&b[4]));
    }
    for pair in two.windows(2).filter(|w| w[0][2] == w[1][2]) {
        assert!(pair[1][4].parse::<f64>().unwrap() >= pair[0][4].parse::<f64>().unwrap() - 1e-9);
    }
    for row in two.iter().filter(|r| r[3] == "0.0") {
        assert!(row[4].parse::<f64>().unwrap() <= 1e-9);
    }
}

#[test]
fn tomography_fidelities() {
    let exact = json("tomography", &[]);
    assert_eq!(exact["result"]["branches"].as_array().unwrap().len(), 32);
    assert!(f(&exact["result"]["fidelity"]["min"]) >= 1.0 - 1e-9);

    let sampled = json("tomography", &["--shots", "40000", "--seed", "11"]);
    assert!(f(&sampled["result"]["fidelity"]["min"]) >= 0.995);

    let raw = json("tomography", &["--shots", "40000", "--readout", "0.02,0.05"]);
    let fixed = json("tomography", &["--shots", "40000", "--readout", "0.02,0.05", "--mitigate"]);
    assert!(f(&fixed["result"]["fidelity"]["mean"]) > f(&raw["result"]["fidelity"]["mean"]));
}

#[test]
fn identity_recovers_noise() {
    let clean = json("identity", &["--n", "3", "--p", "0"]);
    assert_eq!(f(&clean["result"]["inferred_p"]), 0.0);
    let noisy = json("identity", &["--n", "5", "--p", "0.05"]);
    assert!((f(&noisy["result"]["inferred_p"]) - 0.05).abs() <= 1e-4);
    assert_eq!(noisy["result"]["per_outcome_fidelity"].as_object().unwrap().len(), 16);
}

#[test]
fn even_chain_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["identity", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd chain length"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["design-test", "--t", "4"],
        vec!["design-test", "--radius", "1.5"],
        vec!["tomography", "--mitigate"],
        vec!["tomography", "--readout", "0.1"],
        vec!["mitigate", "--counts", "missing.json", "--readout", "0.1,0.1"],
        vec!["sweep", "--model", "none"],
        vec!["frequencies", "--counts-output", "c.json"],
    ] {
        let out = run_in(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn singular_calibration_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let counts = r#"{"n": 2, "shots": 10, "seed": 0, "angles": [0.0], "counts": {"0": 6, "1": 4}}"#;
    std::fs::write(dir.path().join("c.json"), counts).unwrap();
    let out = run_in(dir.path(), &["mitigate", "--counts", "c.json", "--readout", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sample_then_mitigate() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "frequencies", "--ensemble", "approx2", "--input", "plus-y", "--shots", "8000", "--seed", "5", "--readout",
            "0.03,0.06", "--counts-output", "c.json", "--calibration-output", "cal.json", "--output", "f.json",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let freq = read(&dir.path().join("f.json"));
    check_schema("frequencies", &freq);
    let counts = read(&dir.path().join("c.json"));
    check_schema("counts", &counts);
    assert_eq!(counts["shots"], 8000);
    check_schema("calibration", &read(&dir.path().join("cal.json")));

    let out = run_in(dir.path(), &["mitigate", "--counts", "c.json", "--calibration", "cal.json", "--output", "m.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read(&dir.path().join("m.json"));
    check_schema("mitigate", &m);

    let tv = |dist: &Value| -> f64 {
        let ideal = freq["result"]["ideal"].as_object().unwrap();
        ideal.iter().map(|(k, p)| (f(p) - f(&dist[k])).abs()).sum::<f64>() / 2.0
    };
    assert!(tv(&m["result"]["mitigated"]) < tv(&m["result"]["raw"]));
    let total: f64 = m["result"]["mitigated"].as_object().unwrap().values().map(f).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn runs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = |name: &str| {
        vec![
            "tomography".to_string(), "--ensemble".into(), "approx2".into(), "--shots".into(), "5000".into(),
            "--seed".into(), "42".into(), "--readout".into(), "0.01,0.02".into(), "--mitigate".into(),
            "--output".into(), name.to_string(),
        ]
    };
    for name in ["a.json", "b.json"] {
        assert!(bin().current_dir(dir.path()).args(args(name)).status().unwrap().success());
    }
    let a = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.json")).unwrap().replace("b.json", "a.json");
    assert_eq!(a, b);

    let other = run_in(dir.path(), &["tomography", "--ensemble", "approx2", "--shots", "5000", "--seed", "43"]);
    let c: Value = serde_json::from_slice(&other.stdout).unwrap();
    assert_ne!(c["result"]["branches"], read(&dir.path().join("a.json"))["result"]["branches"]);
}
