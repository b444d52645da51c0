use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("{0} requires the exact backend")]
    ApproxBackend(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("Jacobi identity fails on (e{0}, e{1}, e{2})")]
    Jacobi(usize, usize, usize),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("degenerate metric")]
    DegenerateMetric,
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("not a derivation: {0}")]
    NotDerivation(String),
    #[error("matrices do not commute: {0}")]
    NotCommuting(String),
    #[error("bases do not form a direct sum")]
    NotDirectSum,
    #[error("decomposition is not standard: {0}")]
    NotStandard(String),
    #[error("decomposition is not pseudo-Iwasawa")]
    NotPseudoIwasawa,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;
