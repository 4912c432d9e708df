//! One-parameter sweeps over the dimensionless groups D(V)/κ, mκ and
//! D(Ω⁰)/κ, holding κ at its base value.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{ExperimentError, Result};
use crate::instance::substream_seed;
use crate::run::{run_scenario, RunRecord};
use crate::stats::spearman;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    DvOverKappa,
    MKappa,
    DOmegaOverKappa,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::DvOverKappa => "dv_over_kappa",
            SweepAxis::MKappa => "m_kappa",
            SweepAxis::DOmegaOverKappa => "domega_over_kappa",
        }
    }

    /// Copy of `base` with the axis set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = base.clone();
        let kappa = c.params.kappa;
        match self {
            SweepAxis::DvOverKappa => c.params.d_v = value * kappa,
            SweepAxis::MKappa => c.params.m = value / kappa,
            SweepAxis::DOmegaOverKappa => c.params.d_omega0 = value * kappa,
        }
        c
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dv_over_kappa" => Ok(SweepAxis::DvOverKappa),
            "m_kappa" => Ok(SweepAxis::MKappa),
            "domega_over_kappa" => Ok(SweepAxis::DOmegaOverKappa),
            _ => Err(format!("unknown axis `{s}` (dv_over_kappa, m_kappa, domega_over_kappa)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub r_end: f64,
    pub delta_end: f64,
    pub r_probe: Option<f64>,
    pub t_lock: Option<f64>,
    pub locked: bool,
    /// (1 − R(probe))·κ²/Var(V); absent when Var(V) = 0.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    /// Spearman coefficient of t_lock against the swept value over the runs
    /// that locked; reported, not asserted.
    pub spearman_t_lock: Option<f64>,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
}

impl SweepRow {
    pub fn from_record(value: f64, record: &RunRecord) -> Self {
        let kappa = record.config.params.kappa;
        let nu = &record.instance.nu;
        let var = kuramoto_lock_core::model::variance(nu);
        let ratio = match record.summary.r_probe {
            Some(r) if var > 0.0 => Some((1.0 - r) * kappa * kappa / var),
            _ => None,
        };
        Self {
            value,
            r_end: record.summary.r_end,
            delta_end: record.summary.delta_end,
            r_probe: record.summary.r_probe,
            t_lock: record.summary.t_lock,
            locked: record.summary.locked,
            ratio,
        }
    }
}

/// Runs `base` once per value. With `fresh_samples` false every run shares
/// the base seed, hence one frozen frequency sample rescaled along the axis;
/// otherwise run k uses seed + k.
pub fn figure_sweep(
    axis: SweepAxis,
    values: &[f64],
    base: &ScenarioConfig,
    fresh_samples: bool,
) -> Result<SweepResult> {
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(ExperimentError::Config(format!("sweep values must be finite and positive, got {v}")));
    }
    let mut indexed: Vec<(usize, RunRecord)> = values
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut c = axis.apply(base, v);
            if fresh_samples {
                c.seed = substream_seed(base.seed, k);
            }
            run_scenario(&c).map(|r| (k, r))
        })
        .collect::<Result<_>>()?;
    indexed.sort_by_key(|(k, _)| *k);
    let records: Vec<RunRecord> = indexed.into_iter().map(|(_, r)| r).collect();
    let rows: Vec<SweepRow> = values.iter().zip(&records).map(|(&v, r)| SweepRow::from_record(v, r)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| r.t_lock.map(|t| (r.value, t))).unzip();
    Ok(SweepResult {
        axis,
        spearman_t_lock: spearman(&xs, &ys),
        rows,
        records,
    })
}

/// Writes the sweep table with one row per value.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| ExperimentError::io(path, e))?;
    Ok(())
}
