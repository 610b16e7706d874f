use thiserror::Error;

#[derive(Debug, Error)]
pub enum QiccError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested sum-rate cannot be met within the power budget.
    #[error("infeasible: requested sum-rate {requested} bits exceeds the maximum {max} bits")]
    Infeasible { requested: f64, max: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QiccError>;
