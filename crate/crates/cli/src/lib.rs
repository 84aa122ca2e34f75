//! Configuration, orchestration and file output for the `etcsim` binary.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod scenario;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, CliResult};
