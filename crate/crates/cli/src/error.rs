use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes. Clap reports usage errors with code 2.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECKS_FAILED: u8 = 1;
    pub const CONFIG: u8 = 3;
    pub const POSITIVITY: u8 = 4;
    pub const BLOWUP: u8 = 5;
    pub const IO: u8 = 6;
    pub const NUMERICAL: u8 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] geodens::Error),
    #[error("step ending after t = {t:e}: {source}")]
    Step {
        t: f64,
        #[source]
        source: geodens::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} invariant checks failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use geodens::Error as E;
        match self {
            Self::Config(_) => exit::CONFIG,
            Self::Io { .. } | Self::Csv(_) => exit::IO,
            Self::ChecksFailed(_) => exit::CHECKS_FAILED,
            Self::Solver(e) | Self::Step { source: e, .. } => match e {
                E::Positivity { .. } | E::VanishingAmplitude(_) => exit::POSITIVITY,
                E::SpectralBlowup { .. } | E::NonFinite => exit::BLOWUP,
                E::Io(_) | E::Snapshot(_) => exit::IO,
                E::InvalidGrid(_) | E::InvalidArgument(_) | E::Dimension { .. } => exit::CONFIG,
                _ => exit::NUMERICAL,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
