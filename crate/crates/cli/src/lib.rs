//! Experiment harness around the `mimb` library: config-driven multi-seed
//! runs, the two k-means baselines, synthetic data and mask generation, and
//! report emission.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use mimb::error::{DataError, EvalError};

pub use commands::{
    cmd_baseline, cmd_eval, cmd_fit, cmd_mask, cmd_synth, BaselineMethod, FitOptions, MaskStrategy,
};
pub use config::{parse_config, ExperimentConfig};
pub use report::{Metrics, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        /// Directory holding the state at the time of failure, if one was written.
        dump: Option<PathBuf>,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 1 for numerical and output failures, 2 for bad
    /// configuration or input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical { .. } | CliError::Io { .. } => 1,
            CliError::Config(_) | CliError::Data(_) | CliError::Eval(_) => 2,
        }
    }
}
