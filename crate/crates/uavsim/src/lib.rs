//! Configuration, experiment runner and artifact writers for the
//! `uavsim-core` simulator.
//!
//! A run reads a TOML [`ExperimentConfig`], trains or plans with each
//! requested algorithm for each seed, and writes CSV tables, SVG plots and a
//! `manifest.csv` into the output directory. [`compare_report`] turns
//! several manifests into a cross-algorithm table.

pub mod artifacts;
pub mod compare;
pub mod config;
mod error;
pub mod harness;
pub mod svg;

pub use compare::{compare_report, Comparison};
pub use config::{load_config, load_config_file, ExperimentConfig};
pub use error::{ConfigError, HarnessError};
pub use harness::{run_experiment, run_probe, Manifest};

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "UAVSIM_OUTPUT_DIR";
