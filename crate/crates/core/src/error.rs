use thiserror::Error;

/// Errors raised by the free-probability toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a series with zero constant term")]
    DivisionByZeroConstantTerm,
    #[error("cannot mix rational and float scalars")]
    ScalarKindMismatch,
    #[error("inner series of a composition must have zero constant term")]
    NonzeroConstantInnerTerm,
    #[error("series is not compositionally invertible (need f(0)=0, f'(0)!=0)")]
    NotInvertible,
    #[error("non-finite scalar: {0}")]
    NonFiniteScalar(f64),
    #[error("series needs at least one coefficient")]
    EmptySeries,
    #[error("size {n} exceeds the configured ceiling {ceiling}")]
    SizeLimitExceeded { n: usize, ceiling: usize },
    #[error("not a set partition: {0}")]
    NotAPartition(String),
    #[error("singular integrand: {0}")]
    SingularIntegrand(String),
    #[error("moment oracle failed: {0}")]
    OracleFailure(String),
    #[error("series order too low: need {needed}, got {got}")]
    OrderTooLow { needed: usize, got: usize },
    #[error("S-transform requires nonzero mean")]
    ZeroMean,
    #[error("x = {0} is outside the continuous support")]
    OutsideSupport(f64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid spectral measure: {0}")]
    InvalidMeasure(String),
    #[error("free Poisson law with rate <= 1 has an atom at zero; negative moments diverge")]
    AtomAtZero,
    #[error("Cauchy transform requested on the branch cut at z = {0}")]
    BranchAmbiguity(String),
    #[error("support of the free binomial law touches 1")]
    SupportTouchesOne,
    #[error("theta must exceed 1, got {0}")]
    ThetaNotGreaterThanOne(f64),
    #[error("infeasible: {0}")]
    InfeasibleConstants(String),
    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
