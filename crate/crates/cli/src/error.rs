use std::fmt;
use std::process::ExitCode;

use chargesite::Error as CoreError;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Internal = 1,
    Config = 2,
    Infeasible = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    /// Pipeline stage that failed, when known.
    pub stage: Option<&'static str>,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: ExitKind::Config, stage: None, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { kind: ExitKind::Internal, stage: None, message: message.into() }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        Self { kind: ExitKind::Infeasible, stage: None, message: message.into() }
    }

    pub fn at(mut self, stage: &'static str) -> Self {
        self.stage.get_or_insert(stage);
        self
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stage {
            Some(stage) => write!(f, "stage `{stage}`: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let kind = match &e {
            CoreError::Io { .. }
            | CoreError::Schema { .. }
            | CoreError::Validation(_)
            | CoreError::RetryExhausted { .. }
            | CoreError::InvalidArgument { .. }
            | CoreError::SampleTooSmall { .. }
            | CoreError::MissingEstimate(_)
            | CoreError::MismatchedSettings(_)
            | CoreError::Mps { .. }
            | CoreError::Json(_) => ExitKind::Config,
            CoreError::InfeasibleSolution(_) => ExitKind::Infeasible,
            _ => ExitKind::Internal,
        };
        Self { kind, stage: None, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::internal(e.to_string())
    }
}
