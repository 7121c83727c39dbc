//! Configuration, orchestration and CSV output for the `gaussthermo` binary.
//! The scans themselves live in `gaussthermo-core`.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

pub use commands::{execute, run, Command};
pub use config::{ConfigArgs, RunConfig, ShiftKind, SpacingKind, StateKind};
pub use error::CliError;
