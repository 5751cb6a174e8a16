use thiserror::Error;

use crate::contingency::Cell;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid axes: {0}")]
    InvalidAxes(String),

    #[error("inconsistent counts for year {year}: cell {cell} would be {value}")]
    InconsistentCounts { year: i32, cell: Cell, value: i128 },

    #[error("invalid counts for year {year}: {reason}")]
    InvalidRecord { year: i32, reason: String },

    #[error("empty population{}", year.map(|y| format!(" in year {y}")).unwrap_or_default())]
    EmptyPopulation { year: Option<i32> },

    #[error("window {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("format error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Format {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("duplicate year {year}{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    DuplicateYear { year: i32, line: Option<usize> },

    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),

    #[error("no year for document(s): {}", .0.join(", "))]
    MissingYear(Vec<String>),

    #[error("infeasible regime spec: {0}")]
    InfeasibleSpec(String),

    #[error("invalid scan spec: {0}")]
    InvalidScanSpec(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }
}
