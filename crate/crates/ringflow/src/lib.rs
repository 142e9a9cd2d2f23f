//! Command-line front end for `ringflow-core`: configuration, file formats,
//! run manifests, and a worker pool for sweeps.

pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;
pub mod verify;

pub use error::{CliError, CliResult};
