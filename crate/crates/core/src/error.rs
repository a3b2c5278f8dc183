//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("invalid window [{start}, {end}) for clip of length {len}")]
    InvalidWindow { start: usize, end: usize, len: usize },

    #[error("energy maps are defined on different grids")]
    IncompatibleGrids,

    #[error("correlation undefined: {0} map has zero variance")]
    UndefinedCorrelation(&'static str),

    #[error("AUC undefined: {0}")]
    UndefinedFixations(&'static str),

    #[error("incompatible clips: {0}")]
    IncompatibleClips(String),

    #[error("no usable windows at {0} granularity")]
    NoUsableWindows(&'static str),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive semi-definite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemiDefinite { eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed pattern matrix: {0}")]
    MalformedPattern(String),

    #[error("guidance mode {mode} requires the {variant} logits")]
    MissingLogits { mode: &'static str, variant: &'static str },

    #[error("clip has no energy")]
    NoEnergy,

    #[error("parse error at byte {offset}: {kind}")]
    Parse { offset: u64, kind: ParseError },

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("wav: {0}")]
    Wav(#[from] hound::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Malformed serialized input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing newline-terminated header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("unknown dtype '{0}'")]
    UnknownDtype(String),
    #[error("shape {0:?} has an empty dimension")]
    EmptyDimension(Vec<usize>),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("trailing data: expected {expected} payload bytes, found {found}")]
    TrailingBytes { expected: u64, found: u64 },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown pattern id {0}")]
    UnknownPattern(u32),
    #[error("invalid content: {0}")]
    InvalidContent(String),
}

impl Error {
    pub(crate) fn parse(offset: u64, kind: ParseError) -> Self {
        Error::Parse { offset, kind }
    }

    /// Attaches the offending file to an error.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ Error::File { .. } => e,
            e => Error::File {
                path: path.into(),
                source: Box::new(e),
            },
        }
    }
}
