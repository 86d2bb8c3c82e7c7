use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Solver(#[from] floqlat::Error),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(2),
            CliError::Solver(floqlat::Error::NonConvergence(_) | floqlat::Error::Singular(_)) => ExitCode::from(3),
            CliError::Solver(_) => ExitCode::from(2),
            CliError::Io(..) => ExitCode::from(1),
        }
    }
}
