use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("query at T={t} outside curve support (max {max})")]
    OutOfSupport { t: f64, max: f64 },

    #[error("fixing required: no CPI fixing at date offset {date}")]
    FixingRequired { date: f64 },

    #[error("price {price} outside no-arbitrage band [{lower}, {upper}]")]
    BandViolation { price: f64, lower: f64, upper: f64 },

    #[error("calendar arbitrage in cap quotes: Cap({to}) - Cap({from}) = {strip_price} < 0")]
    CalendarArbitrage {
        from: f64,
        to: f64,
        strip_price: f64,
    },

    #[error("infeasible target {target}: requested {requested}, attainable [{lower}, {upper}]")]
    Infeasible {
        target: String,
        requested: f64,
        lower: f64,
        upper: f64,
    },

    #[error("correlation is not identifiable: {0}")]
    Unidentifiable(String),

    #[error("consistency condition violated: residual {residual:e} exceeds {tolerance:e}")]
    ConsistencyViolated { residual: f64, tolerance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Schema {
        path: String,
        line: u64,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures caused by malformed or inconsistent inputs, as
    /// opposed to numerical failures on well-formed inputs.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::OutOfSupport { .. }
                | Error::FixingRequired { .. }
                | Error::Schema { .. }
                | Error::Io { .. }
                | Error::Json(_)
        )
    }
}
