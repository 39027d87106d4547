//! Circuit files, experiment configuration and the parallel experiment
//! harness around [`segloc_core`].

pub mod config;
pub mod format;
pub mod harness;

pub use config::{ConfigError, ExperimentConfig, LocatorSettings};
pub use format::{parse_program, serialize_program, ParseError, ParseErrorKind};
pub use harness::{run_experiment, ExperimentReport, MethodSummary, TrialRecord};
