//! Point-set I/O, experiments and reports for the `ballspace` command.

pub mod error;
pub mod experiments;
pub mod io;
pub mod report;

pub use error::{CliError, Result};
pub use experiments::{check_suite, run, Check, ExperimentSpec, Outcome};
pub use report::{render, Format, Param, ResultRow};
