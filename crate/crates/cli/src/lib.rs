//! Configuration parsing, experiment orchestration and artifact output for
//! the two-pulse propagation solvers.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod verify;

pub use config::{parse_config, ExperimentConfig, SolverKind};
pub use error::CliError;
pub use experiment::{print_area_curves, run_experiment, RunArtifacts};
