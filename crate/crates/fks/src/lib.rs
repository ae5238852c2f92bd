//! Command-line driver, file formats and benchmark harness for `fks-core`.

pub mod config;
pub mod driver;
pub mod output;
pub mod timing;

pub use config::RunConfig;
pub use driver::{bench, convergence_study, run, simulate, StepRule, Stop, StudyConfig, StudyStep};
