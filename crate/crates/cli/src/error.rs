//! CLI-level errors and their exit-code mapping: 1 for validation (including
//! config parse problems and failed verification), 2 for spacelike
//! violations, 3 for numerical or I/O failures.

use minkflow::SolverError;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Spacelike(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 1,
            CliError::Spacelike(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "config parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Spacelike(m) => write!(f, "spacelike violation: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SolverError> for CliError {
    fn from(err: SolverError) -> Self {
        match err {
            SolverError::Validation(_) | SolverError::GridMismatch { .. } => {
                CliError::Validation(err.to_string())
            }
            SolverError::DomainViolation { .. } | SolverError::SpacelikeViolation { .. } => {
                CliError::Spacelike(err.to_string())
            }
            SolverError::RangeViolation { .. }
            | SolverError::SingularSystem { .. }
            | SolverError::InsufficientData(_)
            | SolverError::Numerical(_) => CliError::Numerical(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
