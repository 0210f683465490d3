//! Batch scenarios over the squeezed-cavity model, written out as CSV
//! datasets plus a JSON manifest.

pub mod config;
pub mod dataset;
pub mod error;
pub mod figures;
pub mod runner;

pub use config::{parse_config, parse_config_with, ConfigError, Mode, Overrides, RunConfig, SCHEMA_HELP};
pub use dataset::{emit_csv, g_label, FigureDataset};
pub use error::RunError;
pub use runner::{execute, manifest, run_scenario, write_outputs, Check, Failure, RunOutcome};
