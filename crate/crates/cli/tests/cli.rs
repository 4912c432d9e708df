use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_kuramoto-lock");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("RUST_LOG").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const MINIMAL: &str = r#"{"params": {"n": 6, "m": 0.5, "d_v": 0.2, "d_omega0": 0.2}, "integration": {"t_end": 40}}"#;
const XYZ: &str =
    r#"{"params": {"n": 6, "m": 0.015, "kappa": 1, "d_v": 0.5, "d_omega0": 0.12}, "instance": {"summary": {"r0": 1}}}"#;
const BIPOLAR: &str = r#"{"params": {"n": 4, "m": 0.1},
    "instance": {"explicit": {"nu": [0, 0, 0, 0], "theta": [0, 3.141592653589793, 0, 3.141592653589793]}}}"#;

#[test]
fn simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", MINIMAL);
    let out = dir.path().join("run");
    let res = run(&["simulate", "--config", s(&config), "--out", s(&out), "--json"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    for f in ["config.json", "records/run.json", "series/run.csv", "summary.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["summary"]["locked"], Value::Bool(true));
}

#[test]
fn overrides_and_seed_reach_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", MINIMAL);
    let out = dir.path().join("run");
    let res = run(&[
        "simulate", "--config", s(&config), "--out", s(&out),
        "--set", "params.kappa=2", "--set", "params.kappa=3", "--seed", "17",
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let record: Value = serde_json::from_str(&fs::read_to_string(out.join("records/run.json")).unwrap()).unwrap();
    assert_eq!(record["config"]["params"]["kappa"], 3.0);
    assert_eq!(record["config"]["seed"], 17);
}

#[test]
fn malformed_configs_exit_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", r#"{"params": {"n": 4"#);
    let res = run(&["simulate", "--config", s(&broken), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&res), 1);
    assert!(stderr(&res).contains("line"), "{}", stderr(&res));

    let typo = write(dir.path(), "typo.json", r#"{"params": {"n": 4}, "integration": {"dt": "fast"}}"#);
    let res = run(&["simulate", "--config", s(&typo), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&res), 1);
    assert!(stderr(&res).contains("integration.dt"), "{}", stderr(&res));

    let missing = dir.path().join("absent.json");
    assert_eq!(code(&run(&["simulate", "--config", s(&missing)])), 1);
}

#[test]
fn zero_coupling_with_certificate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"params": {"n": 4, "kappa": 0, "d_v": 0.1}, "certify": ["simple"]}"#,
    );
    let res = run(&["simulate", "--config", s(&config), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&res), 1);
    assert!(stderr(&res).contains("kappa"), "{}", stderr(&res));
}

#[test]
fn numeric_blow_up_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", r#"{"params": {"n": 4, "d_v": 1.7e308}, "certify": []}"#);
    let res = run(&["simulate", "--config", s(&config), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&res), 3, "{}", stderr(&res));
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let xyz = write(dir.path(), "xyz.json", XYZ);
    let res = run(&["certify", "--config", s(&xyz), "--json"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v[0]["report"]["pass"], Value::Bool(true));
    assert!(v[0]["report"]["free_params"]["eta"].is_number());
    assert!(v[0]["report"]["per_condition"][0]["margin"].is_number());

    let bipolar = write(dir.path(), "bipolar.json", BIPOLAR);
    let res = run(&["certify", "--config", s(&bipolar), "--json"]);
    assert_eq!(code(&res), 2);
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    let conditions = v[0]["report"]["per_condition"].as_array().unwrap();
    let f1 = conditions.iter().find(|c| c["name"] == "F1.R0").expect("F1 reported");
    assert_eq!(f1["pass"], Value::Bool(false));
    assert_eq!(f1["margin"], 0.0);

    let five = write(dir.path(), "five.json", MINIMAL);
    let res = run(&["certify", "--config", s(&five), "--n3"]);
    assert_eq!(code(&res), 1);
    assert!(stderr(&res).contains("3 oscillators"), "{}", stderr(&res));
}

#[test]
fn certify_human_output_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let xyz = write(dir.path(), "xyz.json", XYZ);
    let out = dir.path().join("cert");
    let res = run(&["certify", "--config", s(&xyz), "--out", s(&out)]);
    assert_eq!(code(&res), 0);
    assert!(stdout(&res).contains("CERTIFIED"));
    assert!(out.join("certificates.json").is_file());
}

#[test]
fn sweep_and_figures() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", MINIMAL);
    let out = dir.path().join("sweep");
    let res = run(&[
        "sweep", "--config", s(&config), "--axis", "m_kappa", "--values", "0.5,1,2", "--out", s(&out), "--json",
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(out.join("summary.csv").is_file());

    let figs = dir.path().join("figs");
    let res = run(&[
        "figures", "--config", s(&config), "--axis", "dv_over_kappa", "--values", "0.1,0.3", "--out", s(&figs),
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    for f in ["order_parameter.svg", "delta.svg"] {
        let svg = fs::read_to_string(figs.join(f)).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"), "{f}");
    }
    assert_eq!(code(&run(&["sweep", "--config", s(&config), "--axis", "bogus", "--values", "1"])), 1);
}

#[test]
fn collide_reports_census() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"params": {"n": 4, "m": 0.1, "kappa": 0.01},
            "instance": {"explicit": {"nu": [1, 1, 2, 2], "theta": [0, 3.141592653589793, 0, 3.141592653589793]}},
            "integration": {"t_end": 50}}"#,
    );
    let res = run(&["collide", "--config", s(&config), "--out", s(&dir.path().join("o")), "--json"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert!(v["total"].as_u64().unwrap() > 10);
}

#[test]
fn campaign_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let res = Command::new(BIN)
        .args(["campaign", "--kind", "first_order", "--instances", "3", "--json", "--out", s(&out)])
        .env("KURAMOTO_LOCK_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["n_certified"], 3);
    assert!(out.join("defects.json").is_file());
}

#[test]
fn selftest_passes_and_detects_perturbation() {
    let res = run(&["selftest", "--json"]);
    assert_eq!(code(&res), 0, "{}", stdout(&res));
    let v: Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() >= 10);

    let res = run(&["selftest"]);
    assert_eq!(code(&res), 0);
    assert!(stdout(&res).contains("0 failed"));

    let res = run(&["selftest", "--perturb-constant"]);
    assert_ne!(code(&res), 0);
    assert!(stdout(&res).contains("FAIL"));
}

#[test]
fn exactly_one_subcommand() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["simulate", "selftest"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}
