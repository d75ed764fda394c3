use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain of definition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A physical object (4-velocity, Lorentz transform) fails its invariant.
    #[error("validation failed: {0}")]
    Validation(String),
    /// A formula was evaluated outside its stated range of validity.
    #[error("outside formula domain: {0}")]
    Domain(String),
    /// One or more configuration fields are invalid.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
