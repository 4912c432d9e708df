//! Inertial Kuramoto oscillators: model, RK4 integration, synchronization
//! diagnostics and closed-form phase-locking certificates.

// `!(x > 0)` is the NaN-rejecting form used for input checks; indexed loops
// mirror the component formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod certifier;
pub mod diagnostics;
pub mod integrator;
pub mod model;
pub mod scalar;

pub use certifier::{CertificateReport, CertifierError};
pub use diagnostics::DiagnosticsError;
pub use integrator::{IntegratorConfig, IntegratorError};
pub use model::{CouplingEval, ModelError, PhaseState, SystemParams};
pub use scalar::Scalar;

pub type SystemParams64 = SystemParams<f64>;
pub type SystemParams32 = SystemParams<f32>;
pub type PhaseState64 = PhaseState<f64>;
pub type PhaseState32 = PhaseState<f32>;
pub type IntegratorConfig64 = IntegratorConfig<f64>;
pub type IntegratorConfig32 = IntegratorConfig<f32>;
pub type CertificateReport64 = CertificateReport<f64>;
