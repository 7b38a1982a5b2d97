use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("format constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("format mismatch: {0}")]
    FormatMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("value not representable: {0}")]
    NotRepresentable(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid network: {0}")]
    Validation(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("input dimension {d} exceeds 2^p = {limit}")]
    DimensionTooLarge { d: usize, limit: String },
    #[error("duplicate input at positions {0} and {1}")]
    DuplicateInput(usize, usize),
    #[error("input out of range: {0}")]
    InputOutOfRange(String),
    #[error("threshold out of range: {0}")]
    ThresholdOutOfRange(String),
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("epsilon = 0 requires a finite domain (Fpq format)")]
    RequiresFiniteDomain,
    #[error("unbounded enumeration: Fp sweeps need an exponent window")]
    UnboundedEnumeration,
    #[error("plan too large: {0}")]
    PlanTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
