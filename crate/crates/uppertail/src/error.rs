use thiserror::Error;

/// Errors produced by the library. Most operations validate their inputs and
/// refuse instances above the documented enumeration caps rather than running
/// for hours.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("instance over cap: {0}")]
    TooLarge(String),
    #[error("target unreachable: {0}")]
    Unreachable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn too_large(msg: impl Into<String>) -> Self {
        Error::TooLarge(msg.into())
    }
}
