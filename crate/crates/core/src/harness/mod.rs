//! Reproducible experiments: seeded parallel trials, metrics, CSV records,
//! percentile aggregation and SVG plots.

mod aggregate;
mod config;
mod experiment;
mod plot;
mod records;

pub use aggregate::{aggregate, checkpoint_grid, percentile, read_aggregates, write_aggregates, AggregateRow};
pub use config::{CalibrationConfig, ExperimentConfig, ProblemConfig, CALIBRATION_SEED};
pub use experiment::{
    calibrate, run_experiment, run_experiment_with_workers, worker_count, CalibrationSummary,
    ExperimentOutput, WORKERS_ENV,
};
pub use plot::{emit_plot, Metric};
pub use records::{compute_metrics, read_records, write_records, RunRecord};
