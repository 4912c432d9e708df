//! Closed-form sufficient conditions for (partial) phase-locking.
//!
//! Every check returns a [`CertificateReport`] listing each inequality with its
//! value, bound and margin. Strict inequalities pass when the margin is
//! positive; non-strict ones pass when the margin is non-negative up to a
//! rounding allowance of [`NON_STRICT_ALLOWANCE`].

mod arc;
mod framework;
mod partial;
mod quantities;
mod report;
mod simple;
mod special;

pub use arc::{
    arrangement_constant, f_estimate_ii, f_lambda, f_max, f_max_radical, f_zero, phi1_estimate,
    phi_roots, theta_star,
};
pub use framework::{check_framework, framework_grid_search, GridSearchRanges};
pub use partial::{check_corollary, check_partial_locking, PartialLockingInput, PartialPredictions};
pub use quantities::{xi, xi_inf, zeta, InstanceSummary};
pub use report::{CertQuantities, CertificateReport, Condition, FreeParams, Theorem, NON_STRICT_ALLOWANCE};
pub use simple::{
    piecewise_selection, check_simple, check_simple_with, selection_bounds_suite, reduced_xi,
    reduced_zeta, resolve_xyz_constant, simple_objective, SelectionBoundsReport, SimpleOptions,
    XyzMinimum, DEFAULT_XYZ_DIVISOR, XYZ_MULTIPLIER_ALIAS,
};
pub use special::{check_first_order, check_n3, n3_threshold, sturm_picone_tstar, Horizon};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifierError {
    #[error("coupling strength must be positive for this certificate")]
    ZeroCoupling,
    #[error("parameter {name} = {value} is out of range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },
    #[error("f_λ = {delta} has no roots: the maximum of f_λ is {f_max}")]
    NoRoots { delta: f64, f_max: f64 },
    #[error("this certificate needs exactly {expected} oscillators, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn invalid<T: crate::scalar::Scalar>(
    name: &'static str,
    value: T,
    reason: impl Into<String>,
) -> CertifierError {
    CertifierError::InvalidParameter {
        name,
        value: value.to_f64().unwrap_or(f64::NAN),
        reason: reason.into(),
    }
}
