//! Experiment harness for the `stablab-core` toolkit: JSON configs, online
//! runs with bound checks, stability sweeps, covers and rate tables.

pub mod bounds;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod rates;
pub mod sweep;
mod wiring;

pub use bounds::{check_at, check_bounds, check_ledger, BoundCheckResult};
pub use config::{AdversaryConfig, Component, ExperimentConfig, Format, Params};
pub use error::{HarnessError, Result};
pub use experiment::{counterexample_config, cover, run, stability, RunArtifacts, StabilityArtifacts, StabilityMode};
pub use rates::{rate_table, rates_csv};
pub use sweep::{sweep, SweepConfig, SweepRow};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "STABLAB_THREADS";

/// Thread count from `STABLAB_THREADS`, or `None` for the rayon default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(error::config_err(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (rayon default if `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool").install(f)
}
