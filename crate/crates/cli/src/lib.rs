//! Model files, reports and CSV output for the `edr` binary.

pub mod error;
pub mod model;
pub mod report;

pub use error::CliError;
