use thiserror::Error;

use crate::cycle::StationId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{quantity} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("infeasible cycle at station {station}: {reason}")]
    Infeasible { station: StationId, reason: String },

    #[error("{0}")]
    NotApplicable(String),

    #[error("unknown fuel '{name}' (available: {})", available.join(", "))]
    FuelNotFound { name: String, available: Vec<String> },

    #[error("undefined metric {metric}: {reason}")]
    UndefinedMetric { metric: &'static str, reason: &'static str },

    #[error("criterion '{criterion}' has an all-zero column")]
    DegenerateColumn { criterion: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn infeasible(station: StationId, reason: impl Into<String>) -> Self {
        Error::Infeasible {
            station,
            reason: reason.into(),
        }
    }

    /// True for errors that mean "this design point has no physical cycle",
    /// as opposed to caller mistakes.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::UndefinedMetric { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
