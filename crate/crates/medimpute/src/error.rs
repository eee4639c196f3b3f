//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad command-line arguments or malformed run configuration.
    #[error("usage: {0}")]
    Usage(String),

    /// Schema file problems: unknown columns, missing level sets, bad JSON.
    #[error("schema: {0}")]
    Schema(String),

    /// Data problems in a CSV or dataset: parse failures, undeclared
    /// categorical levels, duplicate (id, time) rows, empty inputs.
    #[error("data: {0}")]
    Data(String),

    /// A column with zero observed entries cannot be imputed.
    #[error("unimputable column {0:?}: no observed values")]
    UnimputableColumn(String),

    /// Numerical or statistical failure: exhausted redraw attempts,
    /// single-class labels, scoring an empty mask record.
    #[error("numerical: {0}")]
    Numerical(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 1 usage, 2 data/schema, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Schema(_)
            | Error::Data(_)
            | Error::UnimputableColumn(_)
            | Error::Io(_)
            | Error::Csv(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}
