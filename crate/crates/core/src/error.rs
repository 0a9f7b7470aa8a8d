use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("capacity exceeded: {what} requires {requested}, cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    /// State whose norm is too far from one to be silently renormalized.
    #[error("state norm² {norm_sq} deviates from 1 by more than {tolerance}")]
    Norm { norm_sq: f64, tolerance: f64 },

    #[error("numerical computation failed: {0}")]
    Computation(String),

    #[error("protocol definition error: {0}")]
    Protocol(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
