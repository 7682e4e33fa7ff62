use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("basis is not integral")]
    NotIntegral,
    #[error("lattice is not a sublattice of the reference lattice")]
    NotSublattice,
    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("result is not integral: {0}")]
    NonIntegralResult(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("no sign change of the theta difference on the bracket")]
    NoSignChange,
    #[error("identity mismatch: {lhs} vs {rhs} (relative error {rel:e})")]
    IdentityMismatch { lhs: f64, rhs: f64, rel: f64 },
    #[error("configuration is infeasible: {0}")]
    Infeasible(String),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("constellation too small: {levels}^{n} points for {cosets} cosets")]
    InsufficientConstellation { levels: usize, n: usize, cosets: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
