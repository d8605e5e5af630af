use crate::pda::ValidationReport;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An array failed validation; the report lists every violated condition.
    #[error("array failed validation:\n{0}")]
    Invalid(ValidationReport),

    /// Mismatched dimensions between two objects that must agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A size or enumeration budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Malformed textual input (grid files, profiles, demand lists).
    #[error("parse error: {0}")]
    Parse(String),

    /// Row or column labels are missing or inconsistent with the expected family.
    #[error("label error: {0}")]
    Label(String),

    /// A precondition on argument values failed.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
