//! Experiment runner for the matconc bound audits: JSON configs in, CSV
//! tables and a JSON summary out.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;

pub use config::{CovEstimator, Experiment, ExperimentConfig, MatrixSource};
pub use error::{CliError, Result};
pub use report::{emit_report, Format, Report, Table, Verdict, SCHEMA_VERSION, TAIL_COLUMNS};
pub use runner::run_experiment;
