use std::fmt;

/// A single failed parameter invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid economy parameters: {}", join_violations(.violations))]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; ")
}

impl ValidationError {
    pub fn contains(&self, message: &str) -> bool {
        self.violations.iter().any(|v| v.message == message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("solver did not converge on [{lo}, {hi}] after {iterations} iterations (residual {residual:e})")]
    Solver {
        lo: f64,
        hi: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("simulation failed at week {week}: {reason}")]
    Simulation { week: usize, reason: String },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("dataset error at line {line}: {reason}")]
    Dataset { line: usize, reason: String },

    #[error("dataset error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
