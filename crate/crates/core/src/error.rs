use thiserror::Error;

use crate::sequences::SequenceKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("LFSR seed must be a nonzero {order}-bit state")]
    ZeroSeed { order: usize },

    #[error("invalid taps {taps:?} for order {order}: {reason}")]
    InvalidTaps {
        order: usize,
        taps: Vec<usize>,
        reason: &'static str,
    },

    #[error("feedback polynomial is not primitive: period {period}, expected {expected}")]
    NotPrimitive { period: u64, expected: u64 },

    #[error("unsupported order {order} (supported: {min}..={max})")]
    UnsupportedOrder {
        order: usize,
        min: usize,
        max: usize,
    },

    #[error("expected a {expected} sequence, got {found}")]
    WrongKind {
        expected: SequenceKind,
        found: SequenceKind,
    },

    #[error("sequence is not a valid {kind} of order {order}: {detail}")]
    CensusFailed {
        kind: SequenceKind,
        order: usize,
        detail: String,
    },

    #[error("inverse D-morphism needs an even bit-sum, got {weight}")]
    OddWeight { weight: usize },

    #[error("window {window:0width$b} does not occur in the sequence")]
    NoSuchWindow { window: u64, width: usize },

    #[error("window has width {found}, expected {expected}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    Dimension {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("{what} at ({row}, {col}) does not fit inside the {rows}x{cols} acyclic grid")]
    OutOfRange {
        what: &'static str,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("pattern is already acyclically extended")]
    AlreadyAcyclic,

    #[error("invalid cross geometry: {0}")]
    CrossGeometry(String),

    #[error("cross sample is inconsistent with the pattern: {0}")]
    Inconsistent(String),

    #[error("no successor rule is known for this sequence ({0})")]
    NoGenerator(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
