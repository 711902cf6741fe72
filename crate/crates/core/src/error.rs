use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("0 has no prime factorization")]
    ZeroLabel,

    #[error("requested {requested} primes but the sieve is limited to {limit}")]
    SieveLimit { requested: usize, limit: usize },

    #[error("{0} has a prime factor beyond the prime table")]
    PrimeOutOfRange(u64),

    #[error("integer label of multi-index overflows u64")]
    OverflowLabel,

    #[error("Hankel matrix needs {dim}+ labels, cap is {cap}")]
    MatrixTooLarge { dim: usize, cap: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("invalid exponent p = {0}; expected p > 0")]
    InvalidExponent(f64),

    #[error("integration dimension {dim} exceeds the grid limit {limit}")]
    WidthTooLarge { dim: usize, limit: usize },

    #[error("grid quadrature did not converge (last relative change {change:e} at {nodes} nodes per axis)")]
    NoConvergence { nodes: usize, change: f64 },

    #[error("singular value iteration did not converge after {0} sweeps")]
    SvdNoConvergence(usize),

    #[error("symbol is zero")]
    ZeroSymbol,

    #[error("p = {0} exceeds the critical exponent; the linear-symbol bound does not apply")]
    AboveCritical(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
