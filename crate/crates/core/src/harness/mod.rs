//! Experiment orchestration: seeded sweeps, estimators, statistical
//! distances and the cross-model rescaling pipeline.

mod pipeline;
mod stats;
mod sweep;

pub use pipeline::{
    universality_pipeline, PipelineComponent, PipelineOptions, PipelineReport, BLOB_POINT_CAP,
    DEFAULT_DELTA, EXPAND_POINT_CAP,
};
pub use stats::{
    fit_exponent, ks_statistic, mean, median, quantile, tv_counts, tv_distance, tv_two_counts,
    variance, ExponentFit,
};
pub use sweep::{
    observe_row, run_sweep, workers_from_env, CellSummary, ColumnSummary, DegreeLaw,
    ExperimentConfig, FitSummary, ModelSpec, PreparedModel, SweepResult, SweepRow, CSV_HEADER,
    SCHEMA_VERSION, WORKERS_ENV,
};
