use thiserror::Error;

/// Errors raised by the symbolic, polyhedral and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live over different variable registries")]
    RegistryMismatch,

    #[error("substitution coefficient must be nonzero")]
    ZeroCoefficient,

    #[error("substitution of `{0}` refers to itself")]
    CircularSubstitution(String),

    #[error("variable `{0}` evaluates to zero")]
    ZeroValue(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid registry: {0}")]
    InvalidRegistry(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cone is empty")]
    EmptyCone,

    #[error("point lies outside the cone (normal {normal:?} has slack {slack})")]
    OutsideCone { normal: Vec<i64>, slack: String },

    #[error("minor index sets have different sizes ({rows} rows, {cols} columns)")]
    SizeMismatch { rows: usize, cols: usize },

    #[error("matrix tags do not fit this bracket: {0}")]
    TagMismatch(String),

    #[error("reality condition violated: {0}")]
    Reality(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
