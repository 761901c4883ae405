use std::fmt;

use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Contract,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input is not valid UTF-8 (byte offset {offset})")]
    Encoding { offset: usize },

    #[error("word form is empty after normalization: {raw:?}")]
    EmptyForm { raw: String },

    #[error("word form {raw:?} contains control character U+{code:04X}")]
    ControlCharacter { raw: String, code: u32 },

    #[error("line {line}: meaning {index} appears more than once")]
    DuplicateMeaning { line: usize, index: u32 },

    #[error("line {line}: meaning index {index} outside 1..={max}")]
    MeaningOutOfRange { line: usize, index: u32, max: u32 },

    #[error("language id {0:?} appears more than once")]
    DuplicateLanguage(String),

    #[error("{a:?} and {b:?} share no filled meaning slots")]
    NoOverlap { a: String, b: String },

    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("distance between {a:?} and {b:?} is {value}; separation time is infinite")]
    Saturated { a: String, b: String, value: f64 },

    #[error("tree has zero root height; cannot calibrate")]
    DegenerateTree,

    #[error("invalid calibration: root year {root} must precede collection year {collection}")]
    InvalidCalibration { root: i32, collection: i32 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("malformed matrix: {0}")]
    Matrix(String),

    #[error("malformed newick at byte {pos}: {message}")]
    Newick { pos: usize, message: String },

    #[error("embedded fixture failed integrity check: {0}")]
    Fixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) => ErrorKind::Io,
            Error::Contract(_) | Error::Fixture(_) => ErrorKind::Contract,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn contract(msg: impl fmt::Display) -> Self {
        Error::Contract(msg.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
