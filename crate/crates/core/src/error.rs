use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the indicator pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text. `line` is 1-based; `field` names the offending column when known.
    #[error("parse error at line {line}{}: {message}", field.as_ref().map(|f| format!(", field `{f}`")).unwrap_or_default())]
    Parse {
        line: usize,
        field: Option<String>,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("budget exceeded: total cost {total_cost} > budget {budget}")]
    BudgetExceeded { total_cost: f64, budget: f64 },

    #[error("invalid window length {0}: must be at least 2")]
    InvalidWindow(usize),

    #[error("insufficient history: period {t} with window {k} needs t > k")]
    InsufficientHistory { t: usize, k: usize },

    #[error("insufficient data: {t_max} periods with window {k} leaves no evaluable period")]
    InsufficientData { t_max: usize, k: usize },

    #[error("period range mismatch: {0}")]
    PeriodMismatch(String),

    #[error("reference bundle integrity: {0}")]
    Integrity(String),

    #[error("refusing to emit report: {0}")]
    EmptyReport(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, field: Option<&str>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
