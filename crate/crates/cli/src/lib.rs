//! Library side of the `gradclust` command: configuration, single runs,
//! seeded experiments, certificate verification and IDX conversion.

pub mod commands;
pub mod config;
pub mod experiment;

use gradclust_core::Error;

pub use commands::{cmd_convert, cmd_experiment, cmd_run, cmd_verify, RunArtifact, RunSummary};
pub use config::{Config, DataSource, Overrides};
pub use experiment::{run_experiment, ExperimentSummary, RepetitionSummary};

/// Process exit codes.
pub mod exit {
    pub const FIXED_POINT: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const MAX_ITERS: i32 = 2;
    pub const CONFIG: i32 = 64;
    pub const DATA: i32 = 65;
    pub const INTERNAL: i32 = 70;
    pub const IO: i32 = 74;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{0}")]
    Core(Error),
    #[error("output error: {0}")]
    Output(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(m) | Error::UnsupportedUpdate(m) => CliError::Config(m),
            e if e.is_data_error() => CliError::Data(e.to_string()),
            e => CliError::Core(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Data(_) => exit::DATA,
            CliError::Core(_) => exit::INTERNAL,
            CliError::Output(_) => exit::IO,
        }
    }
}

pub(crate) fn write_output(path: &std::path::Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("summaries serialize");
    s.push(b'\n');
    s
}
