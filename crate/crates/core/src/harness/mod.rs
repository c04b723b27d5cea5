//! Configuration-driven experiments and acceptance verdicts.

pub mod acceptance;
pub mod config;
pub mod run;
pub mod verdict;

pub use acceptance::experiment_verdicts;
pub use config::{ExperimentConfig, GeometryKind, OUTPUT_ROOT_ENV, SMOKE_CONFIG};
pub use run::{run_experiment, ExperimentReport, MemberReport};
pub use verdict::{read_verdicts, write_verdicts, Outcome, Verdict};
