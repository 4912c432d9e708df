//! Config-driven experiments on the inertial Kuramoto model: seeded instance
//! generation, single runs with certificates and diagnostics, parameter
//! sweeps, certify-then-simulate campaigns and collision censuses.

pub mod campaign;
pub mod census;
pub mod config;
pub mod error;
pub mod instance;
pub mod persist;
pub mod run;
pub mod stats;
pub mod sweep;

pub use campaign::{certify_campaign, CampaignKind, CampaignReport, CampaignSpec};
pub use census::{collision_census, CollisionCensus};
pub use config::{CertifierKind, ModelKind, ScenarioConfig, SCENARIO_SCHEMA};
pub use error::{ExperimentError, Result};
pub use run::{certify, run_scenario, RunRecord};
pub use sweep::{figure_sweep, SweepAxis, SweepResult};

/// Core library, re-exported so front ends need a single dependency.
pub use kuramoto_lock_core as core;
