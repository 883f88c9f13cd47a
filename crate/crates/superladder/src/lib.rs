//! Configuration-driven runs over the ladder toolkit: config parsing, the task
//! registry and report and CSV emission.

pub mod config;
pub mod output;
pub mod report;
pub mod tasks;

pub use config::{ConfigError, RunConfig, SCHEMA_VERSION};
pub use report::RunReport;
pub use tasks::{Task, TaskRegistry};

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
