//! Output directory layout:
//!
//! ```text
//! <out>/config.json        the configuration that produced the results
//! <out>/records/<id>.json  one RunRecord (or campaign outcome) per run
//! <out>/series/<id>.csv    diagnostics time series per run
//! <out>/summary.csv        one row per run
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::campaign::CampaignReport;
use crate::error::{ExperimentError, Result};
use crate::run::{RunRecord, SeriesRow};
use crate::sweep::{write_sweep_csv, SweepResult};

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        for sub in ["records", "series"] {
            let dir = root.join(sub);
            fs::create_dir_all(&dir).map_err(|e| ExperimentError::io(&dir, e))?;
        }
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, relative: &str, value: &T) -> Result<PathBuf> {
        let path = self.root.join(relative);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text + "\n").map_err(|e| ExperimentError::io(&path, e))?;
        Ok(path)
    }

    pub fn write_config<T: Serialize + ?Sized>(&self, config: &T) -> Result<PathBuf> {
        self.write_json("config.json", config)
    }

    /// Writes `records/<id>.json` and `series/<id>.csv`.
    pub fn write_record(&self, id: &str, record: &RunRecord) -> Result<()> {
        self.write_json(&format!("records/{id}.json"), record)?;
        write_series_csv(&self.root.join(format!("series/{id}.csv")), &record.series)
    }

    pub fn write_summary<R: Serialize>(&self, rows: &[R]) -> Result<PathBuf> {
        let path = self.root.join("summary.csv");
        let mut w = csv::Writer::from_path(&path)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| ExperimentError::io(&path, e))?;
        Ok(path)
    }
}

pub fn write_series_csv(path: &Path, rows: &[SeriesRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| ExperimentError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct RunSummaryRow<'a> {
    id: &'a str,
    seed: u64,
    n: usize,
    certified: bool,
    locked: bool,
    t_lock: Option<f64>,
    r_end: f64,
    delta_end: f64,
    collisions: Option<usize>,
}

/// Persists a single run.
pub fn save_run(root: &Path, record: &RunRecord) -> Result<OutputDir> {
    let out = OutputDir::create(root)?;
    out.write_config(&record.config)?;
    out.write_record("run", record)?;
    out.write_summary(&[RunSummaryRow {
        id: "run",
        seed: record.config.seed,
        n: record.config.params.n,
        certified: record.certified(),
        locked: record.summary.locked,
        t_lock: record.summary.t_lock,
        r_end: record.summary.r_end,
        delta_end: record.summary.delta_end,
        collisions: record.collisions.as_ref().map(|c| c.census.total),
    }])?;
    Ok(out)
}

/// Persists a sweep: base config, one record and series per value, and the
/// sweep table as the summary.
pub fn save_sweep<C: Serialize>(root: &Path, base: &C, sweep: &SweepResult) -> Result<OutputDir> {
    let out = OutputDir::create(root)?;
    out.write_config(base)?;
    for (k, record) in sweep.records.iter().enumerate() {
        out.write_record(&format!("{:03}", k), record)?;
    }
    write_sweep_csv(&out.root.join("summary.csv"), &sweep.rows)?;
    out.write_json("sweep.json", sweep)?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct CampaignSummaryRow {
    index: usize,
    seed: u64,
    n: usize,
    certified: bool,
    locked: Option<bool>,
    t_lock: Option<f64>,
    qm_min_slack: Option<f64>,
    defects: usize,
}

/// Persists a campaign: spec, one outcome per instance and a summary table.
pub fn save_campaign(root: &Path, report: &CampaignReport) -> Result<OutputDir> {
    let out = OutputDir::create(root)?;
    out.write_config(&report.spec)?;
    for o in &report.outcomes {
        out.write_json(&format!("records/{:04}.json", o.index), o)?;
    }
    let rows: Vec<CampaignSummaryRow> = report
        .outcomes
        .iter()
        .map(|o| CampaignSummaryRow {
            index: o.index,
            seed: o.seed,
            n: o.instance.nu.len(),
            certified: o.certificate.pass,
            locked: o.locked,
            t_lock: o.t_lock,
            qm_min_slack: o.qm_min_slack,
            defects: o.defects.len(),
        })
        .collect();
    out.write_summary(&rows)?;
    out.write_json("defects.json", &report.defects)?;
    Ok(out)
}
