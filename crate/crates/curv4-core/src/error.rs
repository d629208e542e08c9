//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = CurvError> = std::result::Result<T, E>;

/// Errors raised by curvature-operator computations.
///
/// `InvalidInput`-family errors mean the caller handed us data that violates a
/// structural precondition (symmetry, trace identity, constraint residuals,
/// malformed files). `Domain` means the data is structurally fine but the
/// requested quantity is not defined there (e.g. the drop term outside the
/// isotropic-positivity cone).
#[derive(Debug, Error)]
pub enum CurvError {
    /// Structural precondition violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Input is valid but the quantity is undefined on it.
    #[error("domain error: {0}")]
    Domain(String),

    /// Unknown model-space name.
    #[error("unknown model '{name}'; valid names: {valid}")]
    UnknownModel { name: String, valid: String },

    /// The integrator produced a non-finite state. The trajectory up to the
    /// last good sample is preserved.
    #[error("integration failed at t = {t}: {detail}")]
    IntegrationFailure {
        t: f64,
        detail: String,
        last: Box<crate::flow::FlowTrajectory>,
    },

    /// Malformed JSON or unrecognized schema.
    #[error("format error: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CurvError {
    /// Short machine-readable tag used in CLI error payloads.
    pub fn tag(&self) -> &'static str {
        match self {
            CurvError::InvalidInput(_) | CurvError::Format(_) => "invalid-input",
            CurvError::Domain(_) => "domain-error",
            CurvError::UnknownModel { .. } => "not-found",
            CurvError::IntegrationFailure { .. } => "integration-failure",
            CurvError::Io(_) => "io-error",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CurvError::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CurvError::Domain(msg.into())
    }
}
