//! Calibrated tolerances for the asymptotic KS checks.
//!
//! At finite `n` the simulated laws differ from their limits, so a KS test
//! at a fixed level eventually rejects for every large enough sample. The
//! tolerance for a statistic at `n >= CALIBRATED_MIN_N` is the distance the
//! pilot measured at `n = PILOT_N` plus the KS critical value of the test
//! sample at the configured significance.

use rayon::prelude::*;

use super::build_pool;
use crate::discrete::run_discrete;
use crate::error::Result;
use crate::limit_laws::{chisq_log_cdf, gumbel_type_cdf, log_gamma_cdf};
use crate::point_process::Normalization;
use crate::samplers::SeedSpec;
use crate::stats::{ks_critical_value, ks_statistic};

pub const PILOT_N: usize = 100_000;
pub const PILOT_REPLICATIONS: u64 = 4000;
pub const PILOT_SEED: u64 = 0x7A11_B0A7;
pub const PILOT_MAX_R: u32 = 3;
pub const PILOT_MAX_M: u32 = 3;

/// Smallest `n` at which calibrated tolerances are applied.
pub const CALIBRATED_MIN_N: usize = 10_000;

/// Pilot KS distance of `T_c/n - ln n - (c-1) ln ln n` from
/// `exp(-e^{-x}/(c-1)!)`, `c = 1..=3`.
pub const PILOT_KS_GUMBEL: [f64; 3] = [
    0.012764273678438132,
    0.10025113503384975,
    0.2921434184229816,
];

/// Pilot KS distance of `ln 2n - T_{1,m}/n` from the law of `ln chi^2_{2m+2}`,
/// `m = 0..=3`.
pub const PILOT_KS_CHI2_LOG: [f64; 4] = [
    0.01276427367843802,
    0.01818788549276462,
    0.016537517387698375,
    0.010691539105014525,
];

/// Pilot KS distance of `psi(T_{r,m})` from its log-gamma limit, indexed
/// `[r-1][m]`.
pub const PILOT_KS_LOG_GAMMA: [[f64; 4]; 3] = [
    [
        0.01276427367843802,
        0.018187885492764733,
        0.016537517387698486,
        0.01069153910501458,
    ],
    [
        0.1002511350338493,
        0.11843044689684384,
        0.13255989298334953,
        0.13941163691042935,
    ],
    [
        0.29214341842298136,
        0.37068945810883946,
        0.4158874571014555,
        0.45547899301160283,
    ],
];

/// Upper limit on the coupled mismatch frequency at `n >= MISMATCH_CEILING_MIN_N`.
pub const MISMATCH_CEILING: f64 = 0.05;
pub const MISMATCH_CEILING_MIN_N: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalibratedLaw {
    Gumbel { c: u32 },
    ChiSqLog { m: u32 },
    LogGamma { r: u32, m: u32 },
}

/// Pilot distance, if the law lies inside the calibrated range.
pub fn pilot_distance(law: CalibratedLaw) -> Option<f64> {
    match law {
        CalibratedLaw::Gumbel { c } => PILOT_KS_GUMBEL.get((c as usize).checked_sub(1)?).copied(),
        CalibratedLaw::ChiSqLog { m } => PILOT_KS_CHI2_LOG.get(m as usize).copied(),
        CalibratedLaw::LogGamma { r, m } => PILOT_KS_LOG_GAMMA
            .get((r as usize).checked_sub(1)?)?
            .get(m as usize)
            .copied(),
    }
}

/// KS tolerance for `sample_size` points at `n`, or `None` when `n` is
/// below the calibrated range or the law was not piloted.
pub fn ks_tolerance(
    law: CalibratedLaw,
    n: usize,
    sample_size: usize,
    significance: f64,
) -> Option<f64> {
    if n < CALIBRATED_MIN_N {
        return None;
    }
    pilot_distance(law).map(|d| d + ks_critical_value(significance, sample_size))
}

/// Standard deviation of the limiting Kolmogorov law of `sqrt(N) D_N`.
pub fn kolmogorov_sd() -> f64 {
    let pi = std::f64::consts::PI;
    let ln2 = std::f64::consts::LN_2;
    (pi * pi / 12.0 - pi / 2.0 * ln2 * ln2).sqrt()
}

/// Allowed increase of a KS distance between two grid points with
/// `sample_size` points each: three standard deviations of the difference.
pub fn ks_monotone_slack(sample_size: usize) -> f64 {
    3.0 * std::f64::consts::SQRT_2 * kolmogorov_sd() / (sample_size as f64).sqrt()
}

/// KS distances measured by a pilot run.
#[derive(Clone, Debug, PartialEq)]
pub struct PilotResult {
    pub n: usize,
    pub replications: u64,
    pub master_seed: u64,
    pub gumbel: Vec<f64>,
    pub chi2_log: Vec<f64>,
    pub log_gamma: Vec<Vec<f64>>,
}

/// Runs the pilot: one discrete trace per replication, every calibrated
/// statistic read off it.
pub fn run_pilot(
    n: usize,
    replications: u64,
    master_seed: u64,
    workers: usize,
) -> Result<PilotResult> {
    let rmax = PILOT_MAX_R;
    let mmax = PILOT_MAX_M as usize;
    let pool = build_pool(workers)?;
    // per replication: T_{r,m} for r = 1..=rmax, m = 0..=mmax (T_{r,0} = T_r)
    let rows: Vec<Vec<u64>> = pool.install(|| {
        (0..replications)
            .into_par_iter()
            .map(|j| {
                let trace = run_discrete(n, rmax, SeedSpec::new(master_seed, j))?;
                let mut row = Vec::new();
                for r in 1..=rmax {
                    row.extend(trace.partial_collection_times(r, mmax)?);
                }
                Ok(row)
            })
            .collect::<Result<_>>()
    })?;
    let width = mmax + 1;
    let column = |r: u32, m: usize| -> Vec<u64> {
        rows.iter()
            .map(|row| row[(r as usize - 1) * width + m])
            .collect()
    };
    let nf = n as f64;
    let mut gumbel = Vec::new();
    let mut log_gamma = Vec::new();
    for r in 1..=rmax {
        let norm = Normalization::new(n, r)?;
        let mut per_m = Vec::new();
        for m in 0..=mmax {
            let sample: Vec<f64> = column(r, m).iter().map(|&t| norm.apply(t as f64)).collect();
            if m == 0 {
                gumbel.push(ks_statistic(&sample, |x| gumbel_type_cdf(r, x))?);
            }
            per_m.push(ks_statistic(&sample, |x| log_gamma_cdf(r, m as u32, x))?);
        }
        log_gamma.push(per_m);
    }
    let chi2_log = (0..=mmax)
        .map(|m| {
            let sample: Vec<f64> = column(1, m)
                .iter()
                .map(|&t| (2.0 * nf).ln() - t as f64 / nf)
                .collect();
            ks_statistic(&sample, |y| chisq_log_cdf(m as u32, y))
        })
        .collect::<Result<_>>()?;
    Ok(PilotResult {
        n,
        replications,
        master_seed,
        gumbel,
        chi2_log,
        log_gamma,
    })
}

impl PilotResult {
    /// The pilot distances as constant declarations.
    pub fn to_rust(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let rows = self
            .log_gamma
            .iter()
            .map(|row| format!("    [{}],", list(row)))
            .collect::<Vec<_>>()
            .join("\n");
        format!(
            "pub const PILOT_KS_GUMBEL: [f64; {}] = [{}];\n\
             pub const PILOT_KS_CHI2_LOG: [f64; {}] = [{}];\n\
             pub const PILOT_KS_LOG_GAMMA: [[f64; {}]; {}] = [\n{rows}\n];\n",
            self.gumbel.len(),
            list(&self.gumbel),
            self.chi2_log.len(),
            list(&self.chi2_log),
            self.log_gamma.first().map_or(0, Vec::len),
            self.log_gamma.len(),
        )
    }
}
