//! Drivers, record cache, report formats and command execution for the
//! `sqfsieve` command-line tool.
//!
//! The exact arithmetic lives in `sqfsieve_core`. This crate adds a worker
//! pool over the core's partitioned scans ([`driver`]), a JSON-lines cache
//! of local densities ([`cache`]), JSON/CSV/table output ([`report`]) and
//! the subcommand implementations ([`run`]).

pub mod cache;
pub mod config;
pub mod driver;
pub mod report;
pub mod run;

pub use config::{Command, Format, RunConfig};
pub use run::execute;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] sqfsieve_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl RunError {
    /// 2 for an exhausted budget, 1 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(sqfsieve_core::Error::BudgetExceeded { .. }) => 2,
            _ => 1,
        }
    }
}
