//! Benchmark orchestration: masking sweeps, observations-per-individual
//! sweeps, and report emission.

mod config;
mod report;
mod runner;

pub use config::{CvConfig, DatasetSource, ExperimentConfig, Method, SolverSettings};
pub use report::{emit_report, AggregateRow, ExperimentReport, ReportRow};
pub use runner::{
    run_experiments, run_missingness_sweep, run_opp_sweep, truncate_to_most_recent,
};
