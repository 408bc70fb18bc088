//! The fixed acceptance battery.

use super::config::{ExperimentConfig, ExperimentKind, Interval};
use super::report::RunReport;
use super::run_all;
use crate::error::Result;

/// Battery experiment labels, in run order.
pub const EXACT_MARGINAL: &str = "exact-marginal";
pub const POINT_PROCESS_COUNTS: &str = "point-process-counts";
pub const TOP_POINT_CONVERGENCE: &str = "top-point-convergence";
pub const COLLECTION_TIME_LAW: &str = "collection-time-law";
pub const MEAN_IDENTITY_SMALL: &str = "mean-identity-small";
pub const MEAN_IDENTITY: &str = "mean-identity";
pub const CHI_SQUARE_LAW: &str = "chi-square-law";
pub const LOG_GAMMA_LAW_R2: &str = "log-gamma-law-r2";
pub const LOG_GAMMA_LAW_R3: &str = "log-gamma-law-r3";
pub const LAST_BUT_INCREMENTS: &str = "last-but-increments";
pub const RARE_TYPES: &str = "rare-types";
pub const COUPLING_MISMATCH: &str = "coupling-mismatch";
pub const NULL_CALIBRATION: &str = "null-calibration";

fn exp(
    label: &str,
    kind: ExperimentKind,
    n_grid: Vec<usize>,
    replications: u64,
    edit: impl FnOnce(&mut ExperimentConfig),
) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind, n_grid);
    cfg.label = Some(label.to_string());
    cfg.replications = replications;
    edit(&mut cfg);
    cfg
}

/// The battery for `seed`. Experiment `k` runs with master seed
/// `seed + k` so no two experiments share random streams.
pub fn battery_configs(seed: u64) -> Vec<ExperimentConfig> {
    use ExperimentKind::*;
    let mut list = vec![
        exp(EXACT_MARGINAL, PoissonizedMarginal, vec![100], 100, |c| {
            c.r = vec![1, 2, 3];
        }),
        exp(
            POINT_PROCESS_COUNTS,
            Theorem1Counts,
            vec![10_000],
            2000,
            |c| {
                c.r = vec![1, 2];
                c.intervals = vec![
                    Interval::new(0.0, None),
                    Interval::new(-1.0, Some(0.0)),
                    Interval::new(0.0, Some(1.0)),
                ];
            },
        ),
        exp(
            TOP_POINT_CONVERGENCE,
            Theorem1Counts,
            vec![100, 10_000],
            10_000,
            |c| {
                c.r = vec![1, 2];
            },
        ),
        exp(
            COLLECTION_TIME_LAW,
            ErdosRenyi,
            vec![100, 1000, 10_000],
            2000,
            |c| {
                c.c = vec![1, 2];
            },
        ),
        exp(MEAN_IDENTITY_SMALL, ErdosRenyi, vec![3], 100_000, |_| {}),
        exp(MEAN_IDENTITY, ErdosRenyi, vec![10, 100], 10_000, |_| {}),
        exp(CHI_SQUARE_LAW, Chi2Law, vec![10_000], 2000, |c| {
            c.m = vec![0, 1, 3];
        }),
        exp(
            LOG_GAMMA_LAW_R2,
            PartialCollection,
            vec![10_000],
            2000,
            |c| {
                c.r = vec![2];
                c.m = vec![0, 1];
                c.increments = false;
            },
        ),
        exp(
            LOG_GAMMA_LAW_R3,
            PartialCollection,
            vec![10_000],
            2000,
            |c| {
                c.r = vec![3];
                c.m = vec![2];
                c.increments = false;
            },
        ),
        exp(
            LAST_BUT_INCREMENTS,
            PartialCollection,
            vec![10_000],
            2000,
            |c| {
                c.r = vec![1];
                c.m = vec![2];
            },
        ),
        exp(RARE_TYPES, RarePath, vec![10_000], 2000, |c| {
            c.r = vec![1, 2];
            c.thresholds = vec![-1.0, 0.0, 1.0, 2.0];
        }),
        exp(
            COUPLING_MISMATCH,
            CouplingDecay,
            vec![100, 1000, 10_000],
            2000,
            |c| {
                c.intervals = vec![Interval::new(-2.0, Some(2.0))];
            },
        ),
        exp(NULL_CALIBRATION, LimitConsistency, Vec::new(), 200, |c| {
            c.m = vec![2];
            c.trial_size = Some(1000);
        }),
    ];
    for (k, cfg) in list.iter_mut().enumerate() {
        cfg.master_seed = seed.wrapping_add(k as u64);
    }
    list
}

/// Runs the battery with `workers` threads.
pub fn run_battery(seed: u64, workers: usize) -> Result<RunReport> {
    let mut configs = battery_configs(seed);
    for c in &mut configs {
        c.workers = Some(workers);
    }
    run_all(&configs, seed, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_configs_validate_and_use_distinct_seeds() {
        let list = battery_configs(42);
        for c in &list {
            c.validate().unwrap();
        }
        let mut seeds: Vec<u64> = list.iter().map(|c| c.master_seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), list.len());
        let mut names: Vec<String> = list.iter().map(|c| c.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), list.len());
    }
}
