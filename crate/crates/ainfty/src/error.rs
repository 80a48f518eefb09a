use thiserror::Error;

/// Errors shared across the whole engine.
///
/// Mathematical *failures* (a relation that does not hold, a non-flat module)
/// are not errors; they are reported as results with witnesses. Errors are
/// reserved for ill-posed inputs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("not a k[u]/(u^{n})-module: u^{n} != 0")]
    NotNilpotent { n: usize },
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("degree rule violated: {0}")]
    DegreeRule(String),
    #[error("coderivation may not have an arity-0 component (must vanish at the marked point)")]
    MarkedPoint,
    #[error("non-composable path: {0}")]
    NonComposable(String),
    #[error("operation requires characteristic zero: {0}")]
    CharZeroRequired(String),
    #[error("operation requires a prime field: {0}")]
    PrimeFieldRequired(String),
    #[error("strict unit required: {0}")]
    MissingUnit(String),
    #[error("empty degree window")]
    WindowEmpty,
    #[error("form degree out of range: {0}")]
    FormDegree(String),
    #[error("degenerate constant part of the 2-form")]
    DegenerateForm,
    #[error("2-form is not closed: {0}")]
    NotClosed(String),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
