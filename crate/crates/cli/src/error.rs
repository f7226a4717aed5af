use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] boltzpart::Error),

    #[error("{0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("uniformity rejected at alpha = {alpha} (p = {p_value:e})")]
    ValidationFailed { p_value: f64, alpha: f64 },
}

impl CliError {
    /// 2 for bad input, 3 for convergence and budget failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(e) if e.is_config_error() => 2,
            CliError::Engine(_) => 3,
            CliError::Config(_) => 2,
            CliError::Io(_) | CliError::ValidationFailed { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use boltzpart::Error as E;
        match self {
            CliError::Engine(E::InvalidSpec(_) | E::OutOfRange(_) | E::SparseCells { .. }) => "config",
            CliError::Engine(E::NotConverged { .. }) => "convergence",
            CliError::Engine(E::RetryCapExhausted { .. }) => "retry_cap",
            CliError::Engine(E::BudgetExceeded(_)) => "budget",
            CliError::Engine(E::SampleOutsideUniverse(_)) => "sampler",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::ValidationFailed { .. } => "validation",
        }
    }

    /// The structured form written to stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}
