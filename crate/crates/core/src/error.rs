use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, AcbmError>;

#[derive(Debug, Error)]
pub enum AcbmError {
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    WriteFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported image format (magic {magic:?})")]
    UnsupportedFormat { magic: String },
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("truncated data: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("malformed disparity file at line {line}: {reason}")]
    MalformedDisparity { line: usize, reason: String },
    #[error("malformed basis file: {0}")]
    MalformedBasis(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("block of side {side} centred at ({x}, {y}) leaves the image")]
    BlockOutOfBounds { x: usize, y: usize, side: usize },
    #[error("image {width}x{height} too small for {side}x{side} blocks (need {needed} complete blocks)")]
    ImageTooSmall {
        width: usize,
        height: usize,
        side: usize,
        needed: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("image heights differ: {reference} vs {secondary}")]
    HeightMismatch { reference: usize, secondary: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },
    #[error("integer overflow computing {0}")]
    Overflow(&'static str),
}

impl AcbmError {
    /// True for errors caused by the filesystem or by malformed input files.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            AcbmError::UnreadableFile { .. }
                | AcbmError::WriteFailure { .. }
                | AcbmError::UnsupportedFormat { .. }
                | AcbmError::CorruptHeader(_)
                | AcbmError::TruncatedData { .. }
                | AcbmError::MalformedDisparity { .. }
                | AcbmError::MalformedBasis(_)
        )
    }
}
