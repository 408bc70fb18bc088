//! Marked Poisson scheme coupled to the discrete one.
//!
//! Coupons arrive at the points of a unit-rate Poisson process; the `k`-th
//! coupon carries the type (mark) `M_k`. The marks come from the same lane
//! as [`crate::discrete::run_discrete`], so for a given [`SeedSpec`] the
//! discrete arrival matrix `Y` is identical in both schemes. The gaps come
//! from a separate lane and `Z(i, r)` is the gap prefix sum at index
//! `Y(i, r)`.

use crate::discrete::{check_multiplicity, collect, CollectorTrace};
use crate::error::{invalid, Error, Result};
use crate::point_process::{Normalization, PointPattern};
use crate::samplers::{check_types, SeedSpec, Stream, LANE_GAPS, LANE_MARKS};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// One realization of the poissonized scheme carrying both `Y` and `Z`.
#[derive(Clone, Debug)]
pub struct CoupledTrace {
    discrete: CollectorTrace,
    times: Vec<f64>,
}

/// Runs the coupled scheme with marks and gaps from the standard lanes of
/// `seed`.
pub fn run_coupled(n: usize, r_max: u32, seed: SeedSpec) -> Result<CoupledTrace> {
    run_coupled_streams(
        n,
        r_max,
        &mut seed.lane(LANE_MARKS),
        &mut seed.lane(LANE_GAPS),
    )
}

/// Runs the coupled scheme with caller-supplied mark and gap streams.
pub fn run_coupled_streams(
    n: usize,
    r_max: u32,
    marks: &mut Stream,
    gaps: &mut Stream,
) -> Result<CoupledTrace> {
    check_types(n)?;
    check_multiplicity(r_max)?;
    let width = r_max as usize;
    let mut times = vec![0.0f64; n * width];
    let mut counts = vec![0u32; n];
    let mut clock = CompensatedSum::default();
    // The discrete matrix is rebuilt by the shared loop; the closure sees
    // each mark first and records the arrival clock for new entries.
    let discrete = collect(n, r_max, || {
        clock.add(gaps.exponential());
        let i = marks.type_index(n);
        let c = counts[i];
        if c < r_max {
            times[i * width + c as usize] = clock.value();
            counts[i] = c + 1;
        }
        i
    });
    Ok(CoupledTrace { discrete, times })
}

impl CoupledTrace {
    pub fn n(&self) -> usize {
        self.discrete.n()
    }

    pub fn r_max(&self) -> u32 {
        self.discrete.r_max()
    }

    pub fn discrete(&self) -> &CollectorTrace {
        &self.discrete
    }

    pub fn total_draws(&self) -> u64 {
        self.discrete.total_draws()
    }

    /// Poissonized time of the `r`-th arrival of zero-based type `i`.
    pub fn time(&self, i: usize, r: u32) -> f64 {
        assert!(
            i < self.n() && r >= 1 && r <= self.r_max(),
            "index out of range"
        );
        self.times[i * self.r_max() as usize + (r - 1) as usize]
    }

    pub fn time_column(&self, r: u32) -> Result<Vec<f64>> {
        if r < 1 || r > self.r_max() {
            return Err(invalid(format!(
                "multiplicity {r} outside 1..={}",
                self.r_max()
            )));
        }
        Ok((0..self.n()).map(|i| self.time(i, r)).collect())
    }

    /// Normalized discrete pattern of `r`-th arrivals.
    pub fn discrete_pattern(&self, r: u32) -> Result<PointPattern> {
        let norm = Normalization::new(self.n(), r)?;
        let col: Vec<f64> = self
            .discrete
            .column(r)?
            .into_iter()
            .map(|y| y as f64)
            .collect();
        norm.normalize(&col)
    }

    /// Normalized poissonized pattern of `r`-th arrivals.
    pub fn poissonized_pattern(&self, r: u32) -> Result<PointPattern> {
        let norm = Normalization::new(self.n(), r)?;
        norm.normalize(&self.time_column(r)?)
    }

    /// Largest normalized displacement `|Z(i, r) - Y(i, r)| / n` over types.
    pub fn max_normalized_deviation(&self, r: u32) -> Result<f64> {
        let y = self.discrete.column(r)?;
        let z = self.time_column(r)?;
        let n = self.n() as f64;
        Ok(y.iter()
            .zip(&z)
            .map(|(&y, &z)| (z - y as f64).abs() / n)
            .fold(0.0, f64::max))
    }

    /// Whether the two normalized patterns put different numbers of points
    /// in the closed interval `[lo, hi]`.
    pub fn counts_differ(&self, r: u32, lo: f64, hi: f64) -> Result<bool> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        let norm = Normalization::new(self.n(), r)?;
        let inside = |x: f64| (lo..=hi).contains(&norm.apply(x));
        let xi = self
            .discrete
            .column(r)?
            .into_iter()
            .filter(|&y| inside(y as f64))
            .count();
        let eta = (0..self.n()).filter(|&i| inside(self.time(i, r))).count();
        Ok(xi != eta)
    }
}

/// Fraction of `replications` coupled runs in which the discrete and
/// poissonized patterns disagree on the count of `[lo, hi]`. Replication
/// `j` uses stream index `first_stream + j`.
pub fn mismatch_probability(
    n: usize,
    r: u32,
    lo: f64,
    hi: f64,
    replications: u64,
    master_seed: u64,
    first_stream: u64,
) -> Result<f64> {
    if n < 3 {
        return Err(invalid("mismatch estimation needs n >= 3"));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if replications < 1 {
        return Err(invalid("need at least one replication"));
    }
    let mut differ = 0u64;
    for j in 0..replications {
        let trace = run_coupled(n, r, SeedSpec::new(master_seed, first_stream + j))?;
        if trace.counts_differ(r, lo, hi)? {
            differ += 1;
        }
    }
    Ok(differ as f64 / replications as f64)
}
