//! Batch driver for the `gibbsflow-core` kernels: configuration, a thread
//! pool executor, ensemble files and report writers.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod output;
pub mod run;

pub use config::{Command, ExperimentConfig, Format};
pub use error::{CliError, Result};
pub use exec::Pool;
