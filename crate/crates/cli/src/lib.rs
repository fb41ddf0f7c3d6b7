//! Library surface of the minkflow CLI: config parsing, the subcommand
//! implementations and the file writers, so integration tests can drive the
//! exact code paths the binary uses.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use commands::{cmd_profile, cmd_run, cmd_sweep, cmd_verify, verify_reports, RunSummary};
pub use config::{parse_config, RunConfig};
pub use error::CliError;
