use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bellkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellkit"))
        .current_dir(dir)
        .env_remove("BELLKIT_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const CHSH1: &str = r#"{"arity": 2, "bound": "2", "terms": [
  {"A": 1, "B": 1, "coeff": "1"}, {"A": 1, "B": 2, "coeff": "-1"},
  {"A": 2, "B": 1, "coeff": "-1"}, {"A": 2, "B": 2, "coeff": "-1"}]}"#;

#[test]
fn construct_mabk_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellkit(
        dir.path(),
        &["construct", "--preset", "mabk", "--out", "mabk.json"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = read(&dir.path().join("mabk.json"));
    assert_eq!(doc["bound"], "2");
    assert_eq!(doc["terms"].as_array().unwrap().len(), 4);
    assert_eq!(doc["manifest"], "mabk.json.manifest.json");
    let manifest = read(&dir.path().join("mabk.json.manifest.json"));
    assert_eq!(manifest["command"], "construct");
    assert_eq!(manifest["outputs"][0], "mabk.json");
}

#[test]
fn construct_family_member_has_bound_eight() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "construct",
        "--u",
        "2",
        "--r",
        "8",
        "--s",
        "4",
        "--t",
        "4",
        "--out",
        "p.json",
    ];
    let out = bellkit(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = read(&dir.path().join("p.json"));
    assert_eq!(doc["bound"], "8");
    assert!(stderr(&out).contains("LHV maximum 8"));

    let raw = bellkit(
        dir.path(),
        &[
            "construct",
            "--u",
            "2",
            "--r",
            "8",
            "--s",
            "4",
            "--t",
            "4",
            "--raw",
        ],
    );
    let doc: Value = serde_json::from_slice(&raw.stdout).unwrap();
    assert_eq!(doc["bound"], "4");
}

#[test]
fn constraint_violation_lists_the_failing_constraints() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellkit(
        dir.path(),
        &["construct", "--u", "0", "--r", "1", "--s", "0", "--t", "0"],
    );
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    for c in ["r - s <= 2u", "r - t <= 2u", "r - s - t <= 0"] {
        assert!(err.contains(c), "missing {c}: {err}");
    }
    assert!(!err.contains("r <= 4 + 2u"));
}

#[test]
fn forced_construction_fails_bound_verification() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "construct",
        "--u",
        "0",
        "--r",
        "1",
        "--s",
        "0",
        "--t",
        "0",
        "--force",
        "--out",
        "f.json",
    ];
    let out = bellkit(dir.path(), &args);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bound verification failed"));
    assert!(dir.path().join("f.json").exists());
}

#[test]
fn negative_parameter_is_a_range_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellkit(
        dir.path(),
        &["construct", "--u", "-1", "--r", "0", "--s", "0", "--t", "0"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn lhv_reports_maximum_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    bellkit(
        dir.path(),
        &["construct", "--preset", "mabk", "--out", "mabk.json"],
    );
    let out = bellkit(dir.path(), &["lhv", "mabk.json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["max"], "2");
    assert_eq!(doc["bound_holds"], true);
    assert_eq!(doc["witness"].as_object().unwrap().len(), 6);
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), "{\"arity\": 2, \"terms\": [").unwrap();
    assert_eq!(code(&bellkit(dir.path(), &["lhv", "bad.json"])), 1);
    assert_eq!(code(&bellkit(dir.path(), &["qmax", "bad.json"])), 1);
    assert_eq!(code(&bellkit(dir.path(), &["lhv", "missing.json"])), 1);
    fs::write(
        dir.path().join("sel.json"),
        r#"{"arity": 2, "terms": [{"A": 7, "coeff": "1"}]}"#,
    )
    .unwrap();
    assert_eq!(code(&bellkit(dir.path(), &["lhv", "sel.json"])), 1);
    assert_eq!(code(&bellkit(dir.path(), &["frobnicate"])), 1);
}

#[test]
fn chsh_at_fixed_settings() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("chsh1.json"), CHSH1).unwrap();
    let out = bellkit(dir.path(), &["qmax", "chsh1.json", "--settings", "fixed"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = doc["value"].as_f64().unwrap();
    assert!((v - 2.828427).abs() < 1e-6, "{v}");
    assert!((doc["factor"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert!(stderr(&out).contains("2.82842712"));
}

#[test]
fn pi5_optimized_violation() {
    let dir = tempfile::tempdir().unwrap();
    bellkit(
        dir.path(),
        &["construct", "--preset", "pi5", "--out", "pi5.json"],
    );
    let out = bellkit(
        dir.path(),
        &[
            "qmax",
            "pi5.json",
            "--settings",
            "optimize",
            "--restarts",
            "4",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["value"].as_f64().unwrap() - 12.87).abs() < 0.01);
    assert!((doc["factor"].as_f64().unwrap() - 1.61).abs() < 0.01);
    assert_eq!(doc["settings"].as_array().unwrap().len(), 3);
}

#[test]
fn sweep_with_one_step_gives_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--family", "eprime", "--r-min", "0", "--r-max", "100", "--steps", "1",
    ];
    let out = bellkit(dir.path(), &args);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        ["r,lambda_max", "0,2.82842712", "100.000000,2.57022404"]
    );
    assert!(stderr(&out).contains("asymptote"));
}

#[test]
fn violation_factor_sweep_starts_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--family",
        "violation-factor",
        "--u-min",
        "0",
        "--u-max",
        "2",
        "--steps",
        "1",
        "--restarts",
        "2",
        "--out",
        "vf.csv",
    ];
    let out = bellkit(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("vf.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[0][5] - 2.0).abs() < 1e-9);
    assert!((rows[1][5] - 1.61).abs() < 0.01);
    assert!(dir.path().join("vf.csv.manifest.json").exists());
}

#[test]
fn bad_sweep_ranges_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let reversed = [
        "sweep", "--family", "eprime", "--r-min", "5", "--r-max", "1", "--steps", "3",
    ];
    assert_eq!(code(&bellkit(dir.path(), &reversed)), 2);
    let zero = [
        "sweep", "--family", "eprime", "--r-min", "0", "--r-max", "1", "--steps", "0",
    ];
    assert_eq!(code(&bellkit(dir.path(), &zero)), 2);
    let negative = [
        "sweep", "--family", "eprime", "--r-min", "-1", "--r-max", "1", "--steps", "2",
    ];
    assert_eq!(code(&bellkit(dir.path(), &negative)), 2);
    let u = [
        "sweep",
        "--family",
        "violation-factor",
        "--u-min",
        "3",
        "--u-max",
        "1",
        "--steps",
        "2",
    ];
    assert_eq!(code(&bellkit(dir.path(), &u)), 2);
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        bellkit(dir, &["construct", "--preset", "pi5", "--out", "pi5.json"]);
        let q = [
            "qmax",
            "pi5.json",
            "--space",
            "xy-plane",
            "--restarts",
            "3",
            "--seed",
            "7",
            "--out",
            "q.json",
        ];
        assert_eq!(code(&bellkit(dir, &q)), 0);
        let s = [
            "sweep", "--family", "eprime", "--r-min", "0", "--r-max", "10", "--steps", "5",
            "--out", "s.csv",
        ];
        assert_eq!(code(&bellkit(dir, &s)), 0);
    }
    for f in ["pi5.json", "q.json", "s.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    bellkit(
        dir.path(),
        &["construct", "--preset", "pi5", "--out", "pi5.json"],
    );
    let out = Command::new(env!("CARGO_BIN_EXE_bellkit"))
        .current_dir(dir.path())
        .env("BELLKIT_SEED", "99")
        .args(["qmax", "pi5.json", "--restarts", "1"])
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["seed"], 99);
}

#[test]
fn catalog_round_trips_into_threshold() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&bellkit(dir.path(), &["catalog", "--out", "cat.json"])),
        0
    );
    let doc = read(&dir.path().join("cat.json"));
    let names: Vec<&str> = doc
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["mabk", "pi5", "ci6"]);
    let args = [
        "threshold",
        "--ineq",
        "catalog:cat.json#pi5",
        "--scenario",
        "two-perfect",
        "--restarts",
        "8",
    ];
    let out = bellkit(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["threshold"], 0.0);
    assert!(rep["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn pi5_symmetric_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellkit(
        dir.path(),
        &[
            "threshold",
            "--ineq",
            "pi5",
            "--scenario",
            "symmetric",
            "--out",
            "t.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep = read(&dir.path().join("t.json"));
    assert!((rep["threshold"].as_f64().unwrap() - 0.668).abs() <= 2e-3);
    assert_eq!(rep["manifest"], "t.json.manifest.json");
    assert!(stderr(&out).contains("symmetric"));
}

#[test]
fn unviolated_catalog_entry_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cat = r#"[{"name": "trivial", "arity": 3, "K": "1",
                   "terms": [{"A": 1, "B": 1, "C": 1, "coeff": "1"}]}]"#;
    fs::write(dir.path().join("triv.json"), cat).unwrap();
    let out = bellkit(dir.path(), &["threshold", "--ineq", "catalog:triv.json"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn unknown_inequality_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&bellkit(dir.path(), &["threshold", "--ineq", "nope"])),
        1
    );
    let missing = ["threshold", "--ineq", "catalog:none.json"];
    assert_eq!(code(&bellkit(dir.path(), &missing)), 1);
}
