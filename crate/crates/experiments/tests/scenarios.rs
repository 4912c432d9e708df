use std::collections::BTreeSet;
use std::f64::consts::PI;

use kuramoto_lock_core::CertifierError;
use kuramoto_lock_experiments::census::collision_census;
use kuramoto_lock_experiments::config::{ExplicitInstance, InstanceSource, SummaryInstance};
use kuramoto_lock_experiments::persist::{save_run, save_sweep};
use kuramoto_lock_experiments::{
    certify, figure_sweep, run_scenario, CertifierKind, ExperimentError, ModelKind, ScenarioConfig, SweepAxis,
    SCENARIO_SCHEMA,
};
use serde_json::Value;

fn explicit(nu: Vec<f64>, theta: Vec<f64>, omega: Vec<f64>, m: f64, kappa: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(nu.len(), m, kappa, 0.0, 0.0);
    c.instance = InstanceSource::Explicit(ExplicitInstance { nu, theta, omega: Some(omega) });
    c
}

#[test]
fn equal_configs_give_identical_records() {
    let mut c = ScenarioConfig::new(12, 0.5, 1.0, 0.4, 0.6).with_seed(99).with_t_end(40.0);
    c.collisions = true;
    let a = run_scenario(&c).unwrap();
    let b = run_scenario(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.provenance.timestamp_unix.is_none());
}

#[test]
fn identical_oscillators_lock_trivially() {
    for seed in 0..3 {
        let rec = run_scenario(&ScenarioConfig::new(10, 1.0, 1.0, 0.0, 0.0).with_seed(seed)).unwrap();
        assert!(rec.summary.locked, "seed {seed}: {:?}", rec.lock);
        assert!(rec.summary.r_end > 1.0 - 1e-6, "seed {seed}: R = {}", rec.summary.r_end);
        assert!(rec.series.windows(2).all(|w| w[1].energy <= w[0].energy + 1e-8));
    }
}

#[test]
fn large_spread_does_not_lock_by_thirty() {
    let rec = run_scenario(&ScenarioConfig::new(50, 1.0, 1.0, 2.0, 0.0).with_seed(0).with_t_end(30.0)).unwrap();
    assert!(!rec.summary.locked);
    // R keeps returning close to zero instead of settling
    let late: Vec<f64> = rec.series.iter().filter(|r| r.t >= 10.0).map(|r| r.r).collect();
    let min = late.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = late.iter().cloned().fold(0.0, f64::max);
    assert!(min < 0.15, "min R {min}");
    assert!(max - min > 0.1, "R range {min}..{max}");
}

#[test]
fn first_order_model_runs() {
    let mut c = ScenarioConfig::new(20, 0.0, 2.0, 0.5, 0.0).with_seed(4).with_t_end(60.0);
    c.model = ModelKind::FirstOrder;
    let rec = run_scenario(&c).unwrap();
    assert!(rec.summary.locked);
    assert_eq!(rec.certificates.len(), 1);
    assert_eq!(rec.certificates[0].kind, CertifierKind::FirstOrder);
    c.collisions = true;
    assert!(matches!(run_scenario(&c), Err(ExperimentError::Config(_))));
}

#[test]
fn certify_summary_and_explicit_instances() {
    // (x, y, z) = (0.5, 0.015, 0.12) with κ = R⁰ = 1
    let mut c = ScenarioConfig::new(6, 0.015, 1.0, 0.5, 0.12);
    c.instance = InstanceSource::Summary(SummaryInstance { r0: 1.0 });
    let reps = certify(&c).unwrap();
    assert_eq!(reps[0].kind, CertifierKind::Simple);
    assert!(reps[0].report.pass);
    assert!(reps[0].report.free_params.is_some());

    let bipolar = explicit(vec![0.0; 4], vec![0.0, PI, 0.0, PI], vec![0.0; 4], 0.1, 1.0);
    let reps = certify(&bipolar).unwrap();
    let rep = &reps[0].report;
    assert!(!rep.pass);
    let f1 = rep.condition("F1.R0").unwrap();
    assert!(!f1.pass);
    assert_eq!(f1.margin, 0.0);

    let mut wrong = ScenarioConfig::new(5, 0.1, 1.0, 0.1, 0.0);
    wrong.certify = Some(vec![CertifierKind::N3]);
    assert!(matches!(
        certify(&wrong),
        Err(ExperimentError::Certifier(CertifierError::WrongSize { expected: 3, got: 5 }))
    ));

    let mut zero = ScenarioConfig::new(5, 0.1, 0.0, 0.1, 0.0);
    assert!(certify(&zero).unwrap().is_empty());
    zero.certify = Some(vec![CertifierKind::Simple]);
    assert!(matches!(certify(&zero), Err(ExperimentError::Config(_))));
}

#[test]
fn summary_instances_cannot_be_simulated() {
    let mut c = ScenarioConfig::new(6, 0.1, 1.0, 0.1, 0.1);
    c.instance = InstanceSource::Summary(SummaryInstance { r0: 0.8 });
    assert!(matches!(run_scenario(&c), Err(ExperimentError::Config(_))));
}

#[test]
fn malformed_documents_point_at_the_offending_path() {
    let err = ScenarioConfig::from_json_str(r#"{"params": {"n": 4}, "lock": {"window": 5, "extra": 1}}"#).unwrap_err();
    assert!(matches!(&err, ExperimentError::Parse { path, .. } if path == "lock.extra"), "{err}");
    let err = ScenarioConfig::from_json_str(r#"{"params": {"n": 4}, "integration": {"stride": -1}}"#).unwrap_err();
    assert!(matches!(&err, ExperimentError::Parse { path, .. } if path == "integration.stride"), "{err}");
    let err = ScenarioConfig::from_json_str(r#"{"params": {"n": 4}"#).unwrap_err();
    assert!(matches!(err, ExperimentError::Parse { .. }));
    let err = ScenarioConfig::from_json_str(r#"{"params": {"n": 4}, "surprise": true}"#).unwrap_err();
    assert!(err.to_string().contains("surprise"), "{err}");
}

fn schema_keys(schema: &Value, pointer: &str) -> BTreeSet<String> {
    schema
        .pointer(pointer)
        .and_then(Value::as_object)
        .unwrap_or_else(|| panic!("schema has no object at {pointer}"))
        .keys()
        .cloned()
        .collect()
}

fn value_keys(v: &Value, key: Option<&str>) -> BTreeSet<String> {
    let obj = match key {
        Some(k) => &v[k],
        None => v,
    };
    obj.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn schema_matches_serialized_config() {
    let schema: Value = serde_json::from_str(SCENARIO_SCHEMA).unwrap();
    let config = serde_json::to_value(ScenarioConfig::new(3, 1.0, 1.0, 0.1, 0.1)).unwrap();
    assert_eq!(schema_keys(&schema, "/properties"), value_keys(&config, None));
    for section in ["params", "initial", "integration", "lock"] {
        assert_eq!(
            schema_keys(&schema, &format!("/properties/{section}/properties")),
            value_keys(&config, Some(section)),
            "section {section}"
        );
    }
    // every default documented in the schema is the one serde applies
    let minimal = ScenarioConfig::from_json_str(r#"{"params": {"n": 3}}"#).unwrap();
    let minimal = serde_json::to_value(minimal).unwrap();
    for section in ["params", "initial", "integration", "lock"] {
        for (key, spec) in schema.pointer(&format!("/properties/{section}/properties")).unwrap().as_object().unwrap() {
            if let Some(default) = spec.get("default") {
                assert_eq!(&minimal[section][key], default, "{section}.{key}");
            }
        }
    }
    for key in ["seed", "model", "instance", "collisions", "cluster_arc", "probe_time", "timestamp"] {
        assert_eq!(&minimal[key], &schema["properties"][key]["default"], "{key}");
    }
}

#[test]
fn locked_small_inertia_run_has_quiet_tail() {
    let mut c = ScenarioConfig::new(6, 0.1, 1.0, 0.2, 1.0).with_seed(12);
    c.collisions = true;
    let rec = run_scenario(&c).unwrap();
    assert!(rec.summary.locked);
    let census = rec.collisions.unwrap().census;
    assert!((census.m_kappa - 0.1).abs() < 1e-15);
    assert_eq!(census.tail_ok, Some(true));
    assert_eq!(census.tail_collisions, 0);
    assert_eq!(census.after_lock, Some(0));
}

/// Two groups {0, 1} and {2, 3} at ν = 1 and 2, each split between antipodal
/// phases. R stays zero and every cross-group pair drifts apart at the rate
/// g(t) = t − m + m e^{−t/m}, so crossings of a pair starting at phase gap
/// d₀ are the multiples of 2π in [d₀ − g(t_end), d₀).
fn nonsync_expected(t_end: f64, m: f64) -> usize {
    let g = t_end - m + m * (-t_end / m).exp();
    let mut total = 0;
    for d0 in [0.0, -PI, PI, 0.0] {
        let lo = ((d0 - g) / (2.0 * PI)).ceil() as i64;
        let hi = (d0 / (2.0 * PI)).ceil() as i64 - 1;
        total += (hi - lo + 1).max(0) as usize;
    }
    total
}

#[test]
fn nonsync_collisions_grow_linearly() {
    let m = 0.1;
    let base = explicit(vec![1.0, 1.0, 2.0, 2.0], vec![0.0, PI, 0.0, PI], vec![0.0; 4], m, 0.01);
    let mut counts = Vec::new();
    for t_end in [50.0, 100.0, 200.0] {
        let census = collision_census(&base.clone().with_t_end(t_end)).unwrap();
        assert_eq!(census.count(0, 1), 0);
        assert_eq!(census.count(2, 3), 0);
        assert_eq!(census.total, nonsync_expected(t_end, m), "t_end {t_end}");
        assert_eq!(census.tail_ok, None);
        counts.push(census.total as f64);
    }
    assert!((counts[2] / counts[1] - 2.0).abs() < 0.05);
    assert!((counts[1] / counts[0] - 2.0).abs() < 0.1);
}

#[test]
fn identical_pairs_are_excluded_from_census() {
    let c = explicit(vec![0.5, 0.5, -0.5], vec![1.0, 1.0, 3.0], vec![0.2, 0.2, 0.0], 0.3, 0.1).with_t_end(30.0);
    let census = collision_census(&c).unwrap();
    assert_eq!(census.excluded_pairs, vec![(0, 1)]);
    assert_eq!(census.count(0, 1), 0);
    assert!(census.count(0, 2) > 0);
    assert_eq!(census.count(0, 2), census.count(1, 2));
}

#[test]
fn lock_time_grows_with_inertia() {
    let base = ScenarioConfig::new(50, 1.0, 1.0, 0.25, 0.5).with_seed(0);
    let sweep = figure_sweep(SweepAxis::MKappa, &[0.25, 0.5, 1.0, 2.0, 4.0], &base, false).unwrap();
    let t: Vec<f64> = sweep.rows.iter().map(|r| r.t_lock.expect("all values lock")).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]), "{t:?}");
    assert_eq!(sweep.spearman_t_lock, Some(1.0));
    // frozen sample: every run shares the same natural frequencies
    assert!(sweep.records.windows(2).all(|w| w[0].instance.nu == w[1].instance.nu));
    assert!(figure_sweep(SweepAxis::MKappa, &[1.0, -1.0], &base, false).is_err());
}

#[test]
fn fresh_samples_change_the_instance() {
    let base = ScenarioConfig::new(8, 1.0, 1.0, 0.2, 0.0).with_seed(3).with_t_end(20.0);
    let sweep = figure_sweep(SweepAxis::DOmegaOverKappa, &[0.5, 0.5], &base, true).unwrap();
    assert_ne!(sweep.records[0].instance.theta0, sweep.records[1].instance.theta0);
    assert_eq!(sweep.records[0].config.seed, 3);
    assert_eq!(sweep.records[1].config.seed, 4);
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let rec = run_scenario(&ScenarioConfig::new(5, 0.5, 1.0, 0.1, 0.1).with_t_end(15.0)).unwrap();
    let out = save_run(dir.path(), &rec).unwrap();
    for f in ["config.json", "records/run.json", "series/run.csv", "summary.csv"] {
        assert!(out.root().join(f).is_file(), "{f}");
    }
    let config = ScenarioConfig::from_path(&out.root().join("config.json")).unwrap();
    assert_eq!(config, rec.config);
    let series = std::fs::read_to_string(out.root().join("series/run.csv")).unwrap();
    let header = series.lines().next().unwrap();
    assert_eq!(header, "t,R,phi,Delta,D_theta,D_omega,P,E,cluster_fraction,cluster_arc");
    assert_eq!(series.lines().count(), rec.series.len() + 1);

    let base = ScenarioConfig::new(6, 1.0, 1.0, 0.1, 0.0).with_t_end(15.0);
    let sweep = figure_sweep(SweepAxis::DvOverKappa, &[0.1, 0.2], &base, false).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = save_sweep(dir.path(), &base, &sweep).unwrap();
    let table = std::fs::read_to_string(out.root().join("summary.csv")).unwrap();
    assert!(table.starts_with("value,r_end,delta_end,r_probe,t_lock,locked,ratio"));
    assert_eq!(table.lines().count(), 3);
    assert!(out.root().join("records/001.json").is_file());
}
