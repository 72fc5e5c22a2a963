//! Scenario parsing, presets and reports for the `bsv` command-line tool.

pub mod parse;
pub mod presets;
pub mod run;
pub mod scenario;
