//! Configuration, experiment pipelines and file output behind the
//! `semiclassical` binary.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ConfigErrors, ExperimentConfig, ExperimentKind};
pub use experiments::{run_experiment, RunError};
