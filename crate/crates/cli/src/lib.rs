//! IO companion to [`pilotopt_core`]: scenario files, the experiment sweep
//! harness with CSV output, and error plumbing for the `pilotopt` binary.

pub mod scenario_file;
pub mod sweep;

pub use scenario_file::{load_scenario, parse_scenario, ScenarioFileError};
