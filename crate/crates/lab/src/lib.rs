//! Experiment drivers, report files and the `schatten-lab` command line on
//! top of `schatten-core`.

pub mod config;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod io;
pub mod report;

pub use config::RunConfig;
pub use error::{LabError, LabResult};
pub use report::ExperimentReport;
