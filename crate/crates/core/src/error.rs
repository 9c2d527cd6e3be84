use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrices {k} and {l} do not commute (relative residual {residual:e})")]
    NonCommuting { k: usize, l: usize, residual: f64 },
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),
    #[error("function returned a non-finite value at eigenvalue row {row}")]
    NonFinite { row: usize },
    #[error("unsupported spectrum law: {0}")]
    BadLaw(String),
    #[error("singular value function evaluated at negative t = {0}")]
    NegativeT(f64),
    #[error("bad exponent {0}")]
    BadExponent(f64),
    #[error("argument {0} outside the domain [0, 1]")]
    DomainError(f64),
    #[error("guard violation: {0}")]
    GuardViolation(String),
    #[error("grid size {grid} aliases frequency {max_freq} (need N > 2*max_freq + 1)")]
    AliasRisk { grid: usize, max_freq: i64 },
    #[error("spectrum is not integral (deviation {deviation:e})")]
    NotIntegral { deviation: f64 },
    #[error("symbol flagged symmetric fails the conjugate-symmetry check")]
    AsymmetricSymbol,
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
