//! Experiment harness for reflected AR-1 bandits: instance generation,
//! parallel runs on shared trajectories, grid tuning, CSV/JSON outputs and
//! manifests that reproduce every output file.

pub mod config;
pub mod error;
pub mod instance;
pub mod io;
pub mod jobs;
pub mod protocol;
pub mod runner;

pub use config::{ExperimentConfig, PolicySetting, PolicySpec};
pub use error::{LabError, Result};
pub use jobs::{execute, execute_with_manifest, load_job, Job, Manifest};
