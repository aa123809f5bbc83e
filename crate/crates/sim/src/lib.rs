//! Link-level simulation on top of `chirpim-core`: experiment configuration,
//! the Monte Carlo engine, CSV/JSON reports and the `chirpim` command line.

pub mod cli;
pub mod config;
pub mod engine;
pub mod report;

/// Failure classes, mapped to process exit codes by the binary.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<chirpim_core::Error> for SimError {
    fn from(e: chirpim_core::Error) -> Self {
        SimError::Numerical(e.to_string())
    }
}

impl SimError {
    /// 2 for bad input, 3 for failures while computing.
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::Validation(_) | SimError::Io(_) => 2,
            SimError::Numerical(_) => 3,
        }
    }
}
