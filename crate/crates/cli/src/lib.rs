//! Configuration-driven front end for `transport-fem`: convergence studies
//! and robustness sweeps written as CSV tables, optional VTK fields.

pub mod catalog;
pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

pub use config::RunConfig;
pub use run::{run, RunOptions, RunSummary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("incompatible configuration: {0}")]
    Incompatible(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("solve failed:\n  {}", .0.join("\n  "))]
    SolveFailed(Vec<String>),
}
