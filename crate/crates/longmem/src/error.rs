//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// The variants split into three broad families: input problems the caller
/// can fix (`InvalidParameter`, `InsufficientData`, `NonFinite`, `Config`,
/// `Parse`), runtime failures (`Io`, `CellFailed`, `Estimation`), and
/// `Internal`, which signals a broken invariant inside the library itself
/// and should never be seen in correct code.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its legal domain.
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        constraint: &'static str,
    },

    /// A series is too short for the requested operation.
    #[error("insufficient data for {what}: need at least {required} observations, got {actual}")]
    InsufficientData {
        what: &'static str,
        required: usize,
        actual: usize,
    },

    /// A series contains a NaN or infinity.
    #[error("non-finite value at position {index} (zero-based)")]
    NonFinite { index: usize },

    /// Estimation could not proceed (for example, fewer than two usable
    /// scales survived).
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// Experiment configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// A text input could not be parsed. Line numbers are one-based.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// An operating-system I/O failure.
    #[error("i/o error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Too many replications of one Monte Carlo cell failed.
    #[error(
        "cell `{cell}`: {failed} of {total} replications failed (more than 1% — first error: {first_error})"
    )]
    CellFailed {
        cell: String,
        failed: usize,
        total: usize,
        first_error: String,
    },

    /// A library invariant was violated; indicates a bug in this crate.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error reflects bad user input (as opposed to a runtime
    /// or internal failure). Used by callers that map errors onto process
    /// exit codes.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::InsufficientData { .. }
                | Error::NonFinite { .. }
                | Error::Config(_)
                | Error::Parse { .. }
        )
    }
}
