//! Experiment runner for location-based relay selection: sweep
//! configuration, parallel Monte Carlo grids, CSV output and the
//! distribution-check report.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{ConfigError, ExperimentKind, Metric, SweepConfig};
pub use experiment::{run_experiment, write_csv, ResultRow, RunError};
pub use report::{dist_check, DistCheckReport};

/// Environment variable holding the worker count. Unset or `0` means one
/// worker per core.
pub const WORKERS_ENV: &str = "LOCRELAY_WORKERS";

pub fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    builder.build()
}

/// Worker count from [`WORKERS_ENV`]; malformed values are an error.
pub fn workers_from_env() -> Result<Option<usize>, String> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{WORKERS_ENV} must be a non-negative integer, got {v:?}")),
        Err(_) => Ok(None),
    }
}
