//! Command-line front end: scenario files, named reproductions, CSV output.

pub mod error;
pub mod exec;
pub mod report;
pub mod reproduce;
pub mod scenario;

pub use error::{CliError, Result};
pub use exec::{run_all, run_scenario, Options, Outcome};
pub use reproduce::{reproduce, EXAMPLES};
pub use scenario::{parse_scenarios, Scenario};
