use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("level {level} exceeds the configured cap {cap}")]
    LevelCap { level: usize, cap: usize },

    #[error("{what} has {size} unknowns, above the dense cap {cap}; use a coarser level")]
    DenseCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level mismatch: expected level {expected} with {expected_len} vertices, got level {got} with {got_len}")]
    LevelMismatch {
        expected: usize,
        expected_len: usize,
        got: usize,
        got_len: usize,
    },

    #[error("time step violates stability: lambda_max(-h^2 mu^-1 H) = {lambda_max} > 3")]
    CflViolation { lambda_max: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("wave data covers |s| <= {available}, transmutation needs |s| <= {required}")]
    InsufficientCoverage { required: f64, available: f64 },

    #[error("fit needs at least {needed} usable points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("spectral decimation bookkeeping failed: {0}")]
    Decimation(String),

    #[error("linear system is singular")]
    Singular,
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
