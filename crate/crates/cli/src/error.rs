//! Error classes and their exit codes.

use serde_json::{json, Value};

use crate::expr::ExprError;

/// Exit status for invalid configuration, arguments or expressions.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for numerical and convergence failures.
pub const EXIT_NUMERIC: i32 = 3;
/// Exit status for failures while evaluating amplitudes or functionals.
pub const EXIT_EVALUATION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Expression(#[from] ExprError),
    #[error(transparent)]
    Core(#[from] photon_ur::Error),
    #[error("cannot write output {0}")]
    Io(String),
    #[error("refusing to emit a non-finite value for {0}")]
    NonFiniteOutput(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use photon_ur::Error as E;
        match self {
            CliError::Config(_) | CliError::Expression(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Core(E::InvalidArgument(_)) => EXIT_CONFIG,
            CliError::Core(
                E::Convergence(_) | E::Cutoff { .. } | E::Bracket { .. } | E::Truncation { .. } | E::PhaseResolution { .. },
            ) => EXIT_NUMERIC,
            CliError::ChecksFailed { .. } => EXIT_NUMERIC,
            CliError::Core(E::NonFinite { .. } | E::ZeroNorm(_) | E::StringSingularity { .. } | E::MissingWeights) => {
                EXIT_EVALUATION
            }
            CliError::NonFiniteOutput(_) => EXIT_EVALUATION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_CONFIG => "config",
            EXIT_NUMERIC => "numeric",
            _ => "evaluation",
        }
    }

    /// The JSON object written to stderr.
    pub fn report(&self) -> Value {
        let mut detail = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Expression(e) = self {
            let position = match e {
                ExprError::Syntax { position, .. } | ExprError::UnknownIdentifier { position, .. } => *position,
            };
            detail["position"] = json!(position);
        }
        json!({ "error": detail })
    }
}
