//! Scenario configuration, presets and the run pipeline behind the
//! `bec-analogue` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod run;

pub use config::{load_scenario, parse_scenario, Preset, ScenarioConfig};
pub use error::CliError;
pub use report::RunReport;
pub use run::{run, Verb};
