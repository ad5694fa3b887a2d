use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("invalid factor {0}: every factor must be at least 2")]
    InvalidFactor(usize),

    #[error("dimension overflow while multiplying factors {0:?}")]
    Overflow(Vec<usize>),

    #[error("vector norm {0} is not 1")]
    NotNormalized(f64),

    #[error("displacement index {0} is out of range for this group")]
    IndexOutOfRange(String),

    #[error("invalid isotropic subset: {0}")]
    InvalidSubset(String),

    #[error("phase assignment does not give a rank-1 projector (deviation {0:e})")]
    NotAProjector(f64),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("order {alpha} outside the admissible range: {reason}")]
    InvalidAlpha { alpha: f64, reason: &'static str },

    #[error("state set has {found} members, expected d^2 = {expected}")]
    CardinalityMismatch { expected: usize, found: usize },

    #[error("conjugated operator matches no displacement operator (best overlap {0})")]
    NoMatch(f64),

    #[error("invalid matrix shape {rows}x{cols} for {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command-line tool: 2 for unreadable
    /// or invalid input, 3 for dimension mismatches, 5 for unsupported
    /// dimensions.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidDimension(_)
            | Error::CardinalityMismatch { .. }
            | Error::Overflow(_) => 3,
            Error::UnsupportedDimension(_) => 5,
            _ => 2,
        }
    }
}
