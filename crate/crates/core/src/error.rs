use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: entry ({row}, {col}) differs by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("{0} must be nonzero")]
    Zero(&'static str),

    #[error("spectral gap at index {index} is degenerate (g = {gap:e})")]
    GapDegenerate { index: usize, gap: f64 },

    #[error("symmetric eigensolver did not converge")]
    NonConvergence,

    #[error("{bound}: argument t = {t} is below the validity threshold {threshold}")]
    Domain {
        bound: &'static str,
        t: f64,
        threshold: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("enumeration over {size} items exceeds the limit of {limit}")]
    EnumerationLimit { size: usize, limit: usize },

    #[error("{needed} trials required for this quantile level, got {got}")]
    InsufficientTrials { needed: usize, got: usize },

    #[error("non-symmetric ensemble passed to a check that requires symmetric summands")]
    NotSymmetricEnsemble,

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
