use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad grouping of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed text or binary input (manifest, dictionary, JSON).
    Parse,
    /// Well-formed input that violates a data precondition.
    Data,
    /// Filesystem or stream failure.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("bad magic {found:?}, expected \"AFT1\"")]
    BadMagic { found: [u8; 4] },

    #[error("truncated trajectory: expected {expected} bytes of payload, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("trajectory has zero {0}")]
    ZeroDims(&'static str),

    #[error("invalid frame rate {0}")]
    InvalidFrameRate(f64),

    #[error("non-finite value at frame {frame}, channel {channel}")]
    NonFinite { frame: usize, channel: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("line {line}: duplicate sample id {id:?}")]
    DuplicateId { line: usize, id: String },

    #[error("set {set_id:?} mixes roles")]
    MixedRoles { set_id: String },

    #[error("sample {id:?}: {source}")]
    Sample {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("trajectory too short for filtering: {frames} frames, need more than {required}")]
    TooShort { frames: usize, required: usize },

    #[error("speaker {speaker:?} has zero variance in channel {channel}")]
    ZeroVariance { speaker: String, channel: usize },

    #[error("channel count mismatch: {left} vs {right}")]
    ChannelMismatch { left: usize, right: usize },

    #[error("frame {frame} has zero norm; cosine distance is undefined")]
    ZeroNorm { frame: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("phone {0:?} is missing from the inventory")]
    UnmappedPhone(String),

    #[error("degenerate training data: {0}")]
    Degenerate(String),

    #[error("missing label {label:?} for unit {unit:?}")]
    MissingLabel { unit: String, label: String },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) => ErrorKind::Io,
            Error::Parse { .. } | Error::DuplicateId { .. } | Error::Json(_) => ErrorKind::Parse,
            Error::Sample { source, .. } => match source.kind() {
                // A sample whose file cannot be read is a data problem in the manifest.
                ErrorKind::Io => ErrorKind::Data,
                k => k,
            },
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn in_sample(self, id: &str) -> Error {
        Error::Sample {
            id: id.to_owned(),
            source: Box::new(self),
        }
    }
}
