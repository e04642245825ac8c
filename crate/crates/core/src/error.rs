use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the watermarking toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("PNG decode error: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("PNG encode error: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),

    #[error("image too small: {0}")]
    ImageTooSmall(String),

    #[error("unsupported security level: {0} bits (only 128 is supported)")]
    UnsupportedSecurity(u32),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("message too long for signing: {0} bytes")]
    MessageTooLong(usize),

    #[error("infeasible capacity: {0}")]
    InfeasibleCapacity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid message length: expected {expected} bits, got {actual}")]
    MessageLength { expected: usize, actual: usize },

    #[error("corpus too small: need at least {needed} images, got {got}")]
    CorpusTooSmall { needed: usize, got: usize },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
