use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible operands: {0}")]
    IncompatibleOperands(String),

    #[error("{0} is not a unit")]
    NonUnit(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("precision {requested} out of range 1..={available}")]
    PrecisionOutOfRange { requested: u32, available: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arity mismatch: expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,

    #[error("a non-constant polynomial is required")]
    ConstantPolynomial,

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("element is not invertible: {0}")]
    NonInvertible(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("parse error: {0}")]
    Parse(String),
}
