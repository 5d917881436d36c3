//! Experiment configuration, Monte Carlo execution and CSV reporting.

mod config;
mod engine;
mod report;
pub mod selftest;

pub use config::{parse_noise, parse_pmf, ExperimentConfig, PatternCount, StrategyKind, DEFAULT_BUDGET, KEYS};
pub use engine::{
    run_experiment, sweep, BoundValues, EventCounts, ExperimentResult, Plan, SweepAxis, SweepPoint, TrialOutcome,
};
pub use report::{
    csv_failure_row, csv_preamble, csv_row, experiment_csv, fmt_g, sweep_csv, wilson_interval, wilson_interval_z,
    CSV_COLUMNS, Z95,
};
