use thiserror::Error;

/// Failures mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NotDetermining(String),
    #[error("{0}")]
    NoCounterexample(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Input(_) => exit::INPUT,
            CliError::NotDetermining(_) => exit::NEGATIVE,
            CliError::NoCounterexample(_) => exit::NO_COUNTEREXAMPLE,
        }
    }
}

impl From<dirreg_core::Error> for CliError {
    fn from(e: dirreg_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const NEGATIVE: i32 = 3;
    pub const NO_COUNTEREXAMPLE: i32 = 4;
}
