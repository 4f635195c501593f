use std::io;

use thiserror::Error;

/// Errors produced by the parser library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {index} (valid range {min}..={max})")]
    IndexOutOfRange {
        index: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid segmentation: {0}")]
    InvalidSegmentation(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("no valid tree can be constructed from the given scores")]
    NoValidTree,

    #[error("the compatible forest is empty")]
    EmptyForest,

    /// An INTRA arc lies above a non-INTRA arc, or an INTRA component is not
    /// contiguous. Carries the offending `(head, modifier)` INTRA arcs.
    #[error("illegal character tree structure, offending intra arcs: {arcs:?}")]
    IllegalStructure { arcs: Vec<(usize, usize)> },

    #[error("missing gold label for arc {head} -> {modifier}")]
    MissingLabel { head: usize, modifier: usize },

    #[error("unknown label: {0}")]
    UnknownLabel(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch}, batch {batch}: {detail}")]
    Diverged {
        epoch: usize,
        batch: usize,
        detail: String,
    },

    #[error("sentence length {0} outside the supported oracle range 1..=9")]
    OracleRange(usize),

    #[error("model error: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
