use kuramoto_lock_core::{CertifierError, DiagnosticsError, IntegratorError, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse configuration at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("override `{0}`: {1}")]
    Override(String, String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Certifier(#[from] CertifierError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ExperimentError {
    /// True when the failure is a blow-up of the numerical solution rather
    /// than a problem with the inputs.
    pub fn is_numeric_abort(&self) -> bool {
        matches!(self, ExperimentError::Integrator(IntegratorError::NonFinite { .. }))
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;
