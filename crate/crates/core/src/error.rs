use thiserror::Error;

/// Errors produced by `rbc-core` operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0} (need at least 2)")]
    InvalidDimension(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("observation point is not strictly inside the polytope")]
    OriginNotInterior,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("unknown facet id {0}")]
    UnknownFacet(usize),

    #[error("candidate oracle exhausted after {accepted} points without certified density")]
    OracleExhausted { accepted: usize },

    #[error("generator exhausted after {attempts} attempts: {reason}")]
    GeneratorExhausted { attempts: usize, reason: String },

    #[error("reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("training diverged at epoch {epoch}: {detail}")]
    Divergence { epoch: usize, detail: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}
