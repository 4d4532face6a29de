//! Command implementations behind the `bubblescan` binary.

pub mod commands;
pub mod format;
pub mod report;
pub mod svg;
pub mod table;

pub use commands::{
    cmd_analyze, cmd_simulate, cmd_validate, OutputFormat, RunConfig, SimulateConfig,
    ValidateConfig,
};
