use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid weight {value} at index {index}: weights must be positive and finite")]
    InvalidWeight { index: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("argument outside the restricted simplex: {0}")]
    DomainViolation(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("unsupported update: {0}")]
    UnsupportedUpdate(String),

    #[error("no convergence after {iters} iterations (last change {last_change:e})")]
    NoConvergence { iters: usize, last_change: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("labels are required for this operation")]
    MissingLabels,

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the input data rather than by the caller's
    /// configuration or by the numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::DegenerateData(_)
                | Error::InvalidValue(_)
                | Error::InvalidWeight { .. }
                | Error::Shape(_)
                | Error::DomainViolation(_)
                | Error::Format(_)
                | Error::InsufficientData(_)
                | Error::MissingLabels
                | Error::Eval(_)
                | Error::Io(_)
                | Error::Csv(_)
        )
    }
}
