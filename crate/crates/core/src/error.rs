use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QcError {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("identity violation: {0}")]
    IdentityViolation(String),
    #[error("degenerate root: {0}")]
    DegenerateRoot(String),
    #[error("rewrite error: {0}")]
    Rewrite(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("pole proximity: {0}")]
    PoleProximity(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type QcResult<T> = Result<T, QcError>;
