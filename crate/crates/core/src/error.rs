use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field order {0} is not a supported prime (2 <= r <= 251)")]
    InvalidField(u32),

    #[error("{0} has no multiplicative inverse")]
    NoInverse(u8),

    #[error("symbol {symbol} out of range for GF({order})")]
    SymbolOutOfRange { symbol: u8, order: u8 },

    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u8, right: u8 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegrees(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
