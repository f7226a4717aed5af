use thiserror::Error;

/// Errors raised by the sampling engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid class specification: {0}")]
    InvalidSpec(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("failed to converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("retry cap of {cap} exhausted in {context}")]
    RetryCapExhausted { context: &'static str, cap: u64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("sample outside the enumerated universe: {0}")]
    SampleOutsideUniverse(String),

    #[error("chi-square cell too sparse: expected count {expected} < 5")]
    SparseCells { expected: f64 },
}

impl Error {
    /// True for errors caused by bad input rather than numerics or budgets.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_) | Error::OutOfRange(_) | Error::SparseCells { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
