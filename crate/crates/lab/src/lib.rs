//! Experiment runner around `biped-core`: configuration files, CSV logs,
//! plain-text checkpoints and the `biped-lab` command line.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod logs;

pub use error::{LabError, LabResult};
