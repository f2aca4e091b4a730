//! Command-line harness around the `qbnb` solver: single solves with JSON and
//! per-generation CSV output, batch comparisons, and Lipschitz bound reports.

pub mod bounds;
pub mod catalog;
pub mod compare;
pub mod report;

use thiserror::Error;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum BenchError {
    /// Bad flags, unknown names, unreadable configs, unparsable input.
    #[error("{0}")]
    Config(String),
    /// An oracle or interval evaluation failed on the problem domain.
    #[error("{0}")]
    Oracle(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Io(_) => 2,
            BenchError::Oracle(_) => 3,
        }
    }
}

impl From<qbnb::search::SolveError> for BenchError {
    fn from(e: qbnb::search::SolveError) -> Self {
        use qbnb::search::SolveError;
        use qbnb::RuleError;
        match e {
            SolveError::InvalidConfig(m) => BenchError::Config(m),
            SolveError::Rule(RuleError::NonFinite(x)) => {
                BenchError::Oracle(format!("objective is not finite at {x:?}"))
            }
            SolveError::Rule(r) => BenchError::Config(r.to_string()),
        }
    }
}

/// Exit code for a finished solve: 0 when converged, 1 when a limit hit.
pub fn status_exit_code(s: qbnb::Status) -> i32 {
    match s {
        qbnb::Status::Converged => 0,
        _ => 1,
    }
}
