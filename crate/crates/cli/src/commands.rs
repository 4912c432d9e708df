use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use kuramoto_lock_experiments::persist::{save_campaign, save_run, save_sweep};
use kuramoto_lock_experiments::run::NamedCertificate;
use kuramoto_lock_experiments::{
    certify_campaign, figure_sweep, run_scenario, CampaignKind, CampaignSpec, CertifierKind, RunRecord,
    ScenarioConfig, SweepAxis,
};
use serde_json::json;

use crate::figures::{line_chart, Series};
use crate::selftest;
use crate::{ScenarioArgs, EXIT_NEGATIVE, EXIT_OK};

/// Loads the config, then applies `--set` overrides and `--seed` in order.
fn load(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut overrides = args.set.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    Ok(ScenarioConfig::from_path_with_overrides(&args.config, &overrides)?)
}

fn print_json<T: serde::Serialize + ?Sized>(value: &T) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

fn certificate_lines(certs: &[NamedCertificate]) -> Vec<String> {
    let mut lines = Vec::new();
    for c in certs {
        let r = &c.report;
        let verdict = if r.pass { "CERTIFIED" } else { "NOT CERTIFIED" };
        lines.push(format!("{:?} ({:?}): {verdict}", c.kind, r.which_theorem));
        if let Some(f) = &r.free_params {
            lines.push(format!(
                "  free parameters: eta = {:.6}, delta = {:.6}, lambda = {:.6}, ell = {:.6}",
                f.eta, f.delta, f.lambda, f.ell
            ));
        }
        lines.push(format!("  {:<14} {:>14} {:>14} {:>14}  {}", "condition", "value", "bound", "margin", "ok"));
        for cond in &r.per_condition {
            lines.push(format!(
                "  {:<14} {:>14.6e} {:>14.6e} {:>14.6e}  {}",
                cond.name,
                cond.value,
                cond.bound,
                cond.margin,
                if cond.pass { "yes" } else { "NO" }
            ));
        }
        for note in &r.notes {
            lines.push(format!("  note: {note}"));
        }
    }
    lines
}

fn run_summary(record: &RunRecord) -> serde_json::Value {
    json!({
        "summary": record.summary,
        "lock": record.lock,
        "certificates": record
            .certificates
            .iter()
            .map(|c| json!({ "kind": c.kind, "pass": c.report.pass }))
            .collect::<Vec<_>>(),
        "collisions": record.collisions.as_ref().map(|c| &c.census),
    })
}

fn print_run(record: &RunRecord, out: &Path) {
    let s = &record.summary;
    println!("output: {}", out.display());
    println!(
        "N = {}, t_end = {}: R(end) = {:.6}, Delta(end) = {:.6}, locked = {}, t_lock = {}",
        record.config.params.n,
        record.config.integration.t_end,
        s.r_end,
        s.delta_end,
        s.locked,
        opt(s.t_lock)
    );
    for line in certificate_lines(&record.certificates) {
        println!("{line}");
    }
}

pub fn simulate(args: &ScenarioArgs, out: &Path) -> Result<u8> {
    let config = load(args)?;
    let record = run_scenario(&config)?;
    save_run(out, &record)?;
    if args.json {
        let mut v = run_summary(&record);
        v["out"] = json!(out);
        print_json(&v)?;
    } else {
        print_run(&record, out);
    }
    Ok(EXIT_OK)
}

pub fn certify(args: &ScenarioArgs, n3: bool, out: Option<&Path>) -> Result<u8> {
    let mut config = load(args)?;
    if n3 {
        config.certify = Some(vec![CertifierKind::N3]);
    }
    let certs = kuramoto_lock_experiments::certify(&config)?;
    if certs.is_empty() {
        bail!("no certificate applies to this scenario (kappa = {})", config.params.kappa);
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("certificates.json");
        fs::write(&path, serde_json::to_string_pretty(&certs)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if args.json {
        print_json(&certs)?;
    } else {
        for line in certificate_lines(&certs) {
            println!("{line}");
        }
    }
    Ok(if certs.iter().all(|c| c.report.pass) { EXIT_OK } else { EXIT_NEGATIVE })
}

pub fn sweep(args: &ScenarioArgs, axis: SweepAxis, values: &[f64], fresh: bool, out: &Path) -> Result<u8> {
    let base = load(args)?;
    let result = figure_sweep(axis, values, &base, fresh)?;
    save_sweep(out, &base, &result)?;
    if args.json {
        print_json(&result)?;
    } else {
        println!("output: {}", out.display());
        println!("{:>12} {:>9} {:>9} {:>9} {:>7} {:>9}", axis.name(), "R(end)", "R(probe)", "t_lock", "locked", "ratio");
        for r in &result.rows {
            println!(
                "{:>12} {:>9.5} {:>9} {:>9} {:>7} {:>9}",
                r.value,
                r.r_end,
                opt(r.r_probe),
                opt(r.t_lock),
                r.locked,
                opt(r.ratio)
            );
        }
        println!("Spearman(value, t_lock) = {}", opt(result.spearman_t_lock));
    }
    Ok(EXIT_OK)
}

fn series_of(record: &RunRecord, label: String, pick: fn(&kuramoto_lock_experiments::run::SeriesRow) -> f64) -> Series {
    Series {
        label,
        points: record.series.iter().map(|r| (r.t, pick(r))).collect(),
    }
}

pub fn figures(args: &ScenarioArgs, axis: Option<SweepAxis>, values: &[f64], out: &Path) -> Result<u8> {
    let base = load(args)?;
    let labelled: Vec<(String, RunRecord)> = match axis {
        Some(axis) => {
            let result = figure_sweep(axis, values, &base, false)?;
            save_sweep(out, &base, &result)?;
            values
                .iter()
                .zip(result.records)
                .map(|(v, r)| (format!("{} = {v}", axis.name()), r))
                .collect()
        }
        None => {
            let record = run_scenario(&base)?;
            save_run(out, &record)?;
            vec![("R".to_string(), record)]
        }
    };
    let r: Vec<Series> = labelled.iter().map(|(l, rec)| series_of(rec, l.clone(), |s| s.r)).collect();
    let d: Vec<Series> = labelled.iter().map(|(l, rec)| series_of(rec, l.clone(), |s| s.delta)).collect();
    let r_path = out.join("order_parameter.svg");
    let d_path = out.join("delta.svg");
    line_chart(&r_path, "Order parameter R(t)", "R", &r)?;
    line_chart(&d_path, "Mean-square deviation Delta(t)", "Delta", &d)?;
    if args.json {
        print_json(&json!({ "figures": [r_path, d_path] }))?;
    } else {
        println!("wrote {} and {}", r_path.display(), d_path.display());
    }
    Ok(EXIT_OK)
}

pub fn collide(args: &ScenarioArgs, out: &Path) -> Result<u8> {
    let mut config = load(args)?;
    config.collisions = true;
    let record = run_scenario(&config)?;
    save_run(out, &record)?;
    let census = &record.collisions.as_ref().expect("collisions were requested").census;
    if args.json {
        print_json(census)?;
    } else {
        println!("output: {}", out.display());
        println!("collisions up to t = {}: {}", census.t_end, census.total);
        for p in census.per_pair.iter().filter(|p| p.count > 0) {
            println!("  ({}, {}): {}", p.i, p.j, p.count);
        }
        if !census.excluded_pairs.is_empty() {
            println!("  identical pairs excluded: {:?}", census.excluded_pairs);
        }
        println!(
            "tail [{}, {}]: {} collisions{}",
            census.tail_start,
            census.t_end,
            census.tail_collisions,
            match census.tail_ok {
                Some(true) => " (empty as expected)",
                Some(false) => " (expected none)",
                None => "",
            }
        );
    }
    Ok(EXIT_OK)
}

pub fn campaign(
    kind: CampaignKind,
    instances: usize,
    seed: u64,
    t_end: Option<f64>,
    json: bool,
    out: &Path,
) -> Result<u8> {
    let mut spec = CampaignSpec::new(kind, instances, seed);
    if let Some(t) = t_end {
        spec.t_end = t;
    }
    let report = certify_campaign(&spec)?;
    save_campaign(out, &report)?;
    if json {
        print_json(&json!({
            "spec": report.spec,
            "n_certified": report.n_certified,
            "n_locked": report.n_locked,
            "defects": report.defects,
        }))?;
    } else {
        println!("output: {}", out.display());
        println!(
            "{:?}: {} instances, {} certified, {} locked, {} defects",
            kind,
            report.outcomes.len(),
            report.n_certified,
            report.n_locked,
            report.defects.len()
        );
        for d in &report.defects {
            println!("  #{} (seed {}): {}", d.index, d.seed, d.reason);
        }
    }
    Ok(if report.defects.is_empty() { EXIT_OK } else { EXIT_NEGATIVE })
}

pub fn selftest(json: bool, perturb: bool) -> Result<u8> {
    let checks = selftest::run(perturb);
    let pass = checks.iter().all(|c| c.pass);
    if json {
        print_json(&json!({ "pass": pass, "checks": checks }))?;
    } else {
        println!("{:<32} {:>12} {:>12}  result", "check", "measured", "limit");
        for c in &checks {
            println!(
                "{:<32} {:>12.3e} {:>12.3e}  {}",
                c.name,
                c.measured,
                c.limit,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        let failed = checks.iter().filter(|c| !c.pass).count();
        println!("{} checks, {} failed", checks.len(), failed);
    }
    Ok(if pass { EXIT_OK } else { EXIT_NEGATIVE })
}
