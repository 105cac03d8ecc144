//! Experiment harness for measurement-based entanglement inflation: a
//! registry of seeded, configurable runs that write self-describing CSV with
//! a hashed manifest, and a verification suite with built-in expected values.

pub mod config;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod output;
pub mod record;
pub mod registry;
pub mod stats;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use record::{ResultRecord, Table, Value};
pub use registry::{list_experiments, run_experiment};
