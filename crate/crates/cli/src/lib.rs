//! Command-line experiments on top of `randopt`: configuration, runs with
//! manifests, and reports.

pub mod config;
pub mod error;
pub mod manifest;
pub mod report;
pub mod run;

pub use config::{apply_overrides, Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use manifest::RunManifest;
pub use report::{emit_report, Report};
pub use run::run_experiment;
