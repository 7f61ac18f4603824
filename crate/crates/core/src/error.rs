use thiserror::Error;

/// Errors produced by the physics and reconstruction routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where a quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("projector set not informationally complete")]
    NotInformationallyComplete,

    #[error("degenerate parametrization: T is zero")]
    DegenerateParametrization,

    #[error("missing count records for labels: {}", .0.join(", "))]
    MissingLabels(Vec<String>),

    #[error("unknown projector label `{0}`")]
    UnknownLabel(String),

    #[error("fringe pattern undersampled: step {step_fs:.4} fs exceeds {limit_fs:.4} fs")]
    Undersampled { step_fs: f64, limit_fs: f64 },

    /// The optimizer kept improving after the last permitted restart.
    #[error("maximum-likelihood search did not converge after {restarts} restarts")]
    NonConvergence {
        restarts: usize,
        best: Box<crate::tomography::Reconstruction>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
