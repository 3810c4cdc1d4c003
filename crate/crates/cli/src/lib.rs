//! Front end for the hybrid gas solver: test-case setup, configuration
//! files, runs with CSV snapshots, run comparison and timing tables.

pub mod bench;
pub mod cases;
pub mod compare;
pub mod config;
pub mod run;
pub mod snapshot;

pub use config::{Case, CaseConfig, ConfigError, Epsilon, Model};
pub use run::{run, simulate, RunError, RunOutput};
pub use snapshot::{Snapshot, SnapshotRow};
