use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("incompatible rings: {0}")]
    IncompatibleRing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("wrong bundle kind: expected {expected}, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("series did not reach tolerance {tolerance:e} within {terms} terms")]
    Convergence { tolerance: f64, terms: u64 },

    #[error("{module}: invalid model: {message}")]
    Model {
        module: &'static str,
        message: String,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid chain complex: {0}")]
    InvalidComplex(String),

    #[error("covering integrity: {0}")]
    CoveringIntegrity(String),

    #[error("matrix family is ill-conditioned: condition number {condition:e} exceeds {cap:e}")]
    Conditioning { condition: f64, cap: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn model(module: &'static str, message: impl Into<String>) -> Self {
        Error::Model {
            module,
            message: message.into(),
        }
    }
}
