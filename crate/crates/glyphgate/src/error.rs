use thiserror::Error;

/// Errors produced by parsing, matching, and repair operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed pdf: {0}")]
    MalformedPdf(String),

    #[error("document is encrypted")]
    Encrypted,

    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("no width entry for glyph {0:?} in font {1}")]
    MissingGlyph(char, String),

    #[error("unknown font: {0}")]
    UnknownFont(String),

    #[error("neither a successor-space spacing value nor a page margin could be inferred")]
    SideChannelAbsent,

    #[error("degenerate redaction site: {0}")]
    DegenerateSite(String),

    #[error("dictionary is empty")]
    EmptyDict,

    #[error("match set is empty")]
    EmptyMatchSet,

    #[error("dpi must be positive, got {0}")]
    InvalidDpi(f64),

    #[error("quantization interval must be positive, got {0}")]
    InvalidInterval(i64),

    #[error("edit-variant enumeration exceeded budget of {0}")]
    CombinatoricBudgetExceeded(usize),

    #[error("repair increased leakage: {0}")]
    RegressionDetected(String),

    #[error("invalid data file {path}: {reason}")]
    BadDataFile { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
