//! Experiment configuration, runs, grids and reports.

mod config;
mod grid;
mod metrics;
mod report;
mod run;

pub use config::{ExperimentConfig, GridAxes, DEFAULT_QUBITS};
pub use grid::{expand_grid, grid_status, run_configs, run_grid, write_failures, GridFailure, GridOutcome};
pub use metrics::{compute_metrics, MetricSet};
pub use report::{median_csv, summary_csv, text_tables, write_reports, SUMMARY_HEADER};
pub use run::{
    load_run_data, read_records, run_experiment, run_id, run_on_tables, save_record, ResolvedSeeds, RunData,
    RunRecord,
};
