//! Seeded experiment sweeps: configuration, parallel replication, verdicts
//! and persisted reports.

pub mod battery;
pub mod calibration;
pub mod config;
mod kinds;
pub mod report;

use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;

pub use battery::{battery_configs, run_battery};
pub use config::{ConfigFile, ExperimentConfig, ExperimentKind, Interval, Overrides};
pub use report::{
    emit_report, read_csv, read_json, read_series, series_path, write_csv, write_series, CsvRow,
    ExperimentReport, Format, Rule, RunReport, Series, StatEntry, Telemetry, Verdict,
};

use crate::error::{Error, Result};
use crate::samplers::SeedSpec;

/// Environment variable consulted for the worker count.
pub const WORKERS_ENV: &str = "COUPON_LIMITS_WORKERS";

/// Worker count from `COUPON_LIMITS_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub(crate) fn build_pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Fans replications out over a pool; results come back in stream order.
pub(crate) struct Replicator {
    pool: ThreadPool,
    master_seed: u64,
    replications: u64,
}

impl Replicator {
    pub(crate) fn new(pool: ThreadPool, master_seed: u64, replications: u64) -> Self {
        Self {
            pool,
            master_seed,
            replications,
        }
    }

    /// Runs `job` for every replication of grid position `block`, replication
    /// `j` on stream `block * replications + j`.
    pub(crate) fn run<T, F>(&self, block: usize, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(SeedSpec) -> Result<T> + Sync + Send,
    {
        let base = block as u64 * self.replications;
        let seed = self.master_seed;
        let results: Vec<Result<T>> = self.pool.install(|| {
            (0..self.replications)
                .into_par_iter()
                .map(|j| job(SeedSpec::new(seed, base + j)))
                .collect()
        });
        let total = results.len();
        let completed = results.iter().filter(|r| r.is_ok()).count();
        let mut out = Vec::with_capacity(total);
        let mut first_error = None;
        for r in results {
            match r {
                Ok(v) => out.push(v),
                Err(e) if first_error.is_none() => first_error = Some(e),
                Err(_) => {}
            }
        }
        match first_error {
            None => Ok(out),
            Some(e) => Err(Error::PartialResult {
                completed,
                total,
                message: e.to_string(),
            }),
        }
    }
}

/// Runs one experiment. The numeric content of the report depends only on
/// the config, never on the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_timed(config, false)
}

/// As [`run_experiment`], optionally recording wall-clock time.
pub fn run_experiment_timed(config: &ExperimentConfig, timing: bool) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let workers = config.workers.unwrap_or_else(default_workers);
    let rep = Replicator::new(
        build_pool(workers)?,
        config.master_seed,
        config.replications,
    );
    let output = kinds::run(config, &rep)?;
    Ok(ExperimentReport {
        name: config.name(),
        config: config.clone(),
        statement: config.kind.statement().to_string(),
        entries: output.entries,
        series: output.series,
        telemetry: Telemetry {
            replications: config.replications,
            total_draws: output.total_draws,
        },
        wall_clock_ms: timing.then(|| start.elapsed().as_millis() as u64),
    })
}

/// Runs a list of experiments into one report.
pub fn run_all(configs: &[ExperimentConfig], master_seed: u64, timing: bool) -> Result<RunReport> {
    let experiments = configs
        .iter()
        .map(|c| run_experiment_timed(c, timing))
        .collect::<Result<_>>()?;
    Ok(RunReport {
        master_seed,
        experiments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replicator_orders_by_stream() {
        let rep = Replicator::new(build_pool(3).unwrap(), 9, 50);
        let out = rep.run(2, |s| Ok(s.stream_index)).unwrap();
        assert_eq!(out, (100..150).collect::<Vec<_>>());
    }

    #[test]
    fn replicator_reports_partial_results() {
        let rep = Replicator::new(build_pool(2).unwrap(), 9, 20);
        let err = rep
            .run(0, |s| {
                if s.stream_index % 5 == 4 {
                    Err(Error::Domain("boom".into()))
                } else {
                    Ok(())
                }
            })
            .unwrap_err();
        match err {
            Error::PartialResult {
                completed, total, ..
            } => {
                assert_eq!(completed, 16);
                assert_eq!(total, 20);
            }
            e => panic!("unexpected {e}"),
        }
    }
}
