use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not a tight frame: {0}")]
    NotTight(String),

    #[error("operator is not semi-orthogonal: {0}")]
    NotSemiOrthogonal(String),

    #[error("painless condition violated: {channels} channels < window length {window}")]
    PainlessViolation { channels: usize, window: usize },

    #[error("negative threshold {0}")]
    NegativeThreshold(f64),

    #[error("step sizes violate sigma*tau*|K|^2 <= 1 (got {0})")]
    StepSizeViolation(f64),

    #[error("dropout fraction {0} outside [0, 1)")]
    FractionOutOfRange(f64),

    #[error("need at least {need} missing samples, mask has {have}")]
    TooFewMissing { need: usize, have: usize },

    #[error("frame too large for exact evaluation: m = {m} exceeds limit {limit}")]
    FrameTooLarge { m: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
