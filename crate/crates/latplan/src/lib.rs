//! Scenario and result files, CSV reports and the command implementations
//! behind the `latplan` binary.

pub mod commands;
pub mod report;
pub mod result;
pub mod scenario;

pub use commands::{BenchMode, BenchReport, CommandError, Overrides};
pub use result::ResultFile;
pub use scenario::{parse_scenario, ScenarioFile};
