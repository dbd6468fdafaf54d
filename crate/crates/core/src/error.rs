use thiserror::Error;

use crate::diagnostics::CutoffStep;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Cutoff doubling hit the dimension budget before the levels settled.
    #[error("cutoff did not converge below dimension {max_dim} ({} steps tried)", history.len())]
    CutoffBudget {
        max_dim: usize,
        history: Vec<CutoffStep>,
    },

    #[error("no start converged to a stationary point; best gradient norm {best_gradient:.3e}")]
    NoStationaryPoint { best_gradient: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for caller-side mistakes (bad input), false for runtime/resource failures.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::Parse { .. })
    }
}
