use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("coefficient sequence too short: need {needed} terms, have {available}")]
    Length { needed: usize, available: usize },

    #[error("range error: {0}")]
    Range(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A truncation point lies too close to an integer to decide `n ≤ x`.
    #[error("ambiguous truncation boundary: {0}")]
    AmbiguousBoundary(String),

    #[error("non-finite intermediate in {0}")]
    NonFinite(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
