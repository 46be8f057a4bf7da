//! The `bandgen` command-line tool: corpus generation, bandwidth reports,
//! training, sampling, evaluation and tuning over a single flat run config.

pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod config;

pub use cli::Cli;
pub use commands::run;
pub use config::RunConfig;
