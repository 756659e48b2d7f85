//! Batch front end for `kdmod-core`: TOML run configuration, CSV and
//! manifest output, and deterministic parallel parameter sweeps.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod montecarlo;
pub mod output;

pub use commands::{run, CliError, Command, RunOptions};
pub use config::{ConfigError, RunConfig};
pub use manifest::RunManifest;
