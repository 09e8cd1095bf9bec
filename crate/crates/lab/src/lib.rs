//! Command-line lab around `besov-core`: configuration, file formats, studies and
//! subcommand execution.

pub mod config;
pub mod error;
pub mod formats;
pub mod run;
pub mod studies;

pub use config::{Plan, RunConfig, Subcommand};
pub use error::{LabError, Result};
pub use run::{run, Outcome};

pub const TOOL: &str = "besov-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
