use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("not a valid state: {0}")]
    InvalidState(String),

    #[error("full tensor representation limited to N <= {max}, got N = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("particle count must be at least 1")]
    EmptySystem,

    #[error("input leaves the symmetric subspace (leakage {leakage:.3e} > {threshold:.3e})")]
    AsymmetricInput { leakage: f64, threshold: f64 },

    #[error("basis is not orthonormal (deviation {0:.3e})")]
    BasisNotOrthonormal(f64),

    #[error("omega = {0} is not an eigenvalue spacing of the observable")]
    UnknownMode(f64),

    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("mode set is not closed under negation (missing {0})")]
    ModesNotSymmetric(f64),

    #[error("mode damping is not completely positive (min eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    #[error("weight density g(x) is negative at x = {0}")]
    NegativeG(f64),

    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("integration step too large: {0}")]
    StepTooLarge(String),

    #[error("unsupported closed-form combination: {0}")]
    UnsupportedCombination(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
