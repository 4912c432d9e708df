//! Scalar functionals along trajectories (order parameters, potential,
//! energy, diameters) and structural reports (clusters, locking, a priori
//! bound checks).

mod bounds;
mod cluster;
mod energy;
mod lock;
mod order;

pub use bounds::{
    frequency_envelope, initial_layer_slack, propagation_slack, quasi_monotonicity_slack,
    PropagationSlack,
};
pub use cluster::{
    arrangement_check, cluster_from_condensation, find_majority_cluster, ArrangementReport,
    ClusterReport, CondensationGate, PairGap,
};
pub use energy::{
    energy, energy_dissipation_residual, potential, potential_gradient, potential_via_order,
};
pub use lock::{detect_locking, LockReport, LockTolerances};
pub use order::{
    diameters, order_state, pairwise_r_squared, subset_diameter, OrderState, PhaseUnwrapper,
    PHI_UNDEFINED_BELOW,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("subset must not be empty")]
    EmptySubset,
    #[error("index {index} out of range for {n} oscillators")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("natural frequencies are not identical (spread {spread:e})")]
    NonIdenticalFrequencies { spread: f64 },
    #[error("snapshots are not equally spaced")]
    NonUniformSpacing,
    #[error("need at least {needed} snapshots, got {got}")]
    TooFewSnapshots { needed: usize, got: usize },
    #[error("snapshots span {span} time units, shorter than the window {window}")]
    WindowTooLong { span: f64, window: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
