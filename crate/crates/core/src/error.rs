use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no equilibrium exists for K = {coupling} < 1")]
    NoEquilibrium { coupling: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model kind {0} is not supported here")]
    UnsupportedKind(String),
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("S(i omega) vanishes, crossing angle undefined")]
    DegenerateS,
    #[error("transversality fails at tau = {tau}: delta = {delta:e}")]
    DegenerateCrossing { tau: f64, delta: f64 },
    #[error("W_{branch}(0) is singular")]
    BranchDomain { branch: i32 },
    #[error("no seed converged at tau = {tau}")]
    NoConvergence { tau: f64 },
    #[error("root within tolerance of the census contour")]
    BoundaryRoot,
    #[error("step {step} exceeds tau/4 = {limit}")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("trajectory is not periodic: {0}")]
    NotPeriodic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
