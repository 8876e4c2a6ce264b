//! CLI error object: every failure is reported as machine-readable JSON
//! with a kind tag and mapped to an exit code (1 input error, 2 solver
//! abort).

use adalloc::model::ModelError;
use adalloc::objectives::ObjectiveError;
use adalloc::propagation::ExactSpreadError;
use adalloc::solvers::SolverError;
use std::fmt;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage",
            message: message.into(),
            code: 1,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: "validation",
            message: message.into(),
            code: 1,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self {
            kind: "io",
            message: format!("{}: {}", path.display(), err),
            code: 1,
        }
    }

    /// The JSON error object printed on stdout before exiting.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "error": { "kind": self.kind, "message": self.message }
        }))
        .expect("error object serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        let kind = match err {
            ModelError::Invalid(_) => "validation",
            _ => "parse",
        };
        Self {
            kind,
            message: err.to_string(),
            code: 1,
        }
    }
}

impl From<ExactSpreadError> for CliError {
    fn from(err: ExactSpreadError) -> Self {
        Self::validation(err.to_string())
    }
}

impl From<ObjectiveError> for CliError {
    fn from(err: ObjectiveError) -> Self {
        Self::validation(err.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(err: SolverError) -> Self {
        match err {
            SolverError::PhiInsufficient { .. } => Self {
                kind: "solver",
                message: err.to_string(),
                code: 2,
            },
            SolverError::GroundSetTooLarge { .. } => Self::validation(err.to_string()),
        }
    }
}
