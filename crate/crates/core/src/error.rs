use thiserror::Error;

/// Errors raised by the feasibility toolkit.
#[derive(Debug, Error)]
pub enum FeasError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("halfspace normal must be nonzero")]
    ZeroNormal,

    #[error("no equidistant point exists in the affine hull of the three points")]
    DegenerateConfiguration,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid ellipsoid: {0}")]
    InvalidEllipsoid(String),

    #[error("instance is empty (at least one constraint is required)")]
    EmptyInstance,

    #[error("constraint {index} has a zero subgradient at a violated point")]
    ZeroSubgradientAtViolation { index: usize },

    #[error("no infeasible start found after {doublings} radius doublings")]
    CannotEscape { doublings: u32 },

    #[error("instance has no Slater point")]
    MissingSlaterPoint,

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("instance contains constraints that cannot be serialized: {0}")]
    Unserializable(String),

    #[error("block vector is not on the diagonal")]
    NotDiagonal,

    #[error(
        "termination mismatch at iteration {iteration}: direct sequence stopped={direct}, product-space sequence stopped={product}"
    )]
    MismatchedTermination {
        iteration: usize,
        direct: bool,
        product: bool,
    },

    #[error("no results to aggregate")]
    EmptyResults,

    #[error("invalid schedule specification {0:?}")]
    InvalidSchedule(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FeasError {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        FeasError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = FeasError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(FeasError::DimensionMismatch { expected, got })
    }
}
