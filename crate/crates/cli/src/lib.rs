//! Command-line front end for `hooke-peo`: run configuration, basis table
//! persistence, figure datasets and manifests.

pub mod basis_io;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::run;
pub use config::{Command, Figure, RunConfig};
pub use error::CliError;
pub use output::Manifest;
