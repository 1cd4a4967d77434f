use thiserror::Error;

/// Errors produced by the tower library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid prime: {0}")]
    InvalidPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-invertible series")]
    NonInvertibleSeries,
    #[error("sqrt branch undefined: constant term is not 1")]
    SqrtBranchUndefined,
    #[error("invalid ramification index r={r} at level {level}")]
    InvalidRamificationIndex { level: usize, r: i64 },
    #[error("divisor not Galois-invariant (P_-1 coefficient {0})")]
    NotInvariant(i64),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("pole at expansion point")]
    PoleAtExpansionPoint,
    #[error("precision exhausted: need order {needed}, have {available}")]
    PrecisionExhausted { needed: i64, available: i64 },
    #[error("function has pole at point")]
    PoleAtPoint,
    #[error("not a point of the tower: {0}")]
    NotATowerPoint(String),
    #[error("t = 1 - x0 is not a local parameter at P_-1 on level 0")]
    NoLocalParameter,
    #[error("ladder construction inconsistency: {0}")]
    LadderInconsistency(String),
    #[error("valuation violation (bug): row {m} has nonzero coefficient below order {eps}")]
    ValuationViolation { m: usize, eps: i64 },
    #[error("expected nonzero order-{0} coefficient missing")]
    MissingLeadingCoefficient(i64),
    #[error("ordering not unique: duplicate (d, b) = ({0}, {1})")]
    OrderingNotUnique(i64, i64),
    #[error("instance too large for brute force: {0}")]
    InstanceTooLarge(String),
    #[error("internal: basis has pole at split place")]
    BasisPoleAtSplitPlace,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

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
