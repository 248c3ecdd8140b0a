//! Batch front-end: config files in, trace CSV and JSON summary out.

pub mod config;
pub mod run;

pub use config::{emit, parse_config, parse_config_str, ConfigError, RunConfig, Scheme};
pub use run::{execute, run, run_file, run_suite, trace_csv, Outcome, Overrides, Summary};
