//! Command-line harness around `fracdiff-core`: forward runs, inversions,
//! experiment batteries and noise injection, all driven by one TOML file.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod commands;
pub mod config;
pub mod io;
pub mod noise;

pub use commands::{Outcome, Overrides};
pub use config::RunConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for anything wrong with the inputs, 3 when a computation fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
