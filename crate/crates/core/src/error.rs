use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("walk reached node {node}, which has no outgoing arcs")]
    DeadEnd { node: usize },

    #[error(
        "walk length {length} is above the enumeration limit {max}; \
         the number of walk types grows super-exponentially with length \
         and so does exact embedding cost"
    )]
    WalkLengthTooLarge { length: usize, max: usize },

    #[error(
        "exact embedding would enumerate about {estimate:.3e} walks \
         (budget {budget:.3e}); use sampled mode instead"
    )]
    CostGuard { estimate: f64, budget: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {tensor}")]
    NonFinite { tensor: &'static str },

    #[error("training diverged at epoch {epoch}, iteration {iteration}")]
    Diverged { epoch: usize, iteration: usize },

    #[error("SMO did not converge for class pair ({0}, {1}) within {2} passes")]
    NoConvergence(usize, usize, usize),

    #[error("numeric check failed: {0}")]
    Numeric(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by bad input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Io { .. }
                | Error::Invalid(_)
                | Error::WalkLengthTooLarge { .. }
                | Error::CostGuard { .. }
                | Error::DimensionMismatch(_)
                | Error::Json(_)
        )
    }
}
