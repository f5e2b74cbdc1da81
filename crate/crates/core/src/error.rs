use thiserror::Error;

/// Errors surfaced by table construction and exact linear algebra.
#[derive(Debug, Error)]
pub enum Error {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {0} must be at least 2")]
    QTooSmall(u64),
    #[error("division by zero in Q(\u{221a}q)")]
    ScalarDivisionByZero,
    #[error("cannot unit-normalize the zero Laurent polynomial")]
    ZeroPolynomial,
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("complex differentials do not square to zero at degree {0}")]
    NotAComplex(i64),
    #[error("symmetric power input must be a two-term rank-1 complex in adjacent degrees")]
    BadSymShape,
    #[error("symmetric power size limit exceeded ({0} basis tensors)")]
    SymSizeLimit(usize),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("chart disagreement on the overlap at weight {0}")]
    ChartMismatch(i64),
    #[error("table ranges differ: {0} vs {1}")]
    RangeMismatch(i64, i64),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("invalid group table: {0}")]
    BadGroupTable(String),
    #[error("invalid character table: {0}")]
    BadCharacterTable(String),
    #[error("missing h0 entry for line bundle {0}")]
    MissingH0(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
