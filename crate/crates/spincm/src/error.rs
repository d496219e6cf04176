use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("outside U: simple root coordinate {root} vanishes")]
    OutsideU { root: usize },
    #[error("constraint violated: residual {residual:e}")]
    Constraint { residual: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
