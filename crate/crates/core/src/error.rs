use thiserror::Error;

/// Errors raised across the library and the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Candidate atom lies in the span of the current frame.
    #[error("span degeneracy: projection residual r = {r:e}")]
    SpanDegenerate { r: f64 },

    /// Energy discarded by a projection exceeded its tolerance.
    #[error("truncation: {0}")]
    Truncation(String),

    #[error("ingestion error at row {row}: {msg}")]
    Ingest { row: usize, msg: String },

    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("record version mismatch: expected {expected}, found {found}")]
    Version { expected: u32, found: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
