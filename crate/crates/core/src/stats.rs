//! Goodness-of-fit tests against the reference laws.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limit_laws::LimitLaw;
use crate::special::{chi_square_sf, ln_factorial, reg_gamma_p};

/// Outcome of one goodness-of-fit test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
    pub law: String,
}

/// Kolmogorov survival function `P(K > lambda)`.
///
/// Uses the alternating series for `lambda >= 1.18` and the theta-function
/// form below it; both are truncated at 100 terms or once a term drops
/// below `1e-10`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let pi = std::f64::consts::PI;
        let v = -pi * pi / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 0..100 {
            let j = (2 * k + 1) as f64;
            let term = (j * j * v).exp();
            sum += term;
            if term < 1e-10 {
                break;
            }
        }
        let cdf = (2.0 * pi).sqrt() / lambda * sum;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += sign * term;
            sign = -sign;
            if term < 1e-10 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

fn ks_lambda(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    (sn + 0.12 + 0.11 / sn) * d
}

/// Asymptotic p-value of a one-sample KS distance `d` from `n` points.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    kolmogorov_sf(ks_lambda(d, n))
}

/// Distance above which the KS test rejects at level `alpha` for `n` points.
pub fn ks_critical_value(alpha: f64, n: usize) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ks_p_value(mid, n) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Two-sided sup distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("NaN in sample".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// KS test of `sample` against an arbitrary continuous CDF.
pub fn ks_test_by(sample: &[f64], law: &str, cdf: impl Fn(f64) -> f64) -> Result<GofResult> {
    let d = ks_statistic(sample, cdf)?;
    Ok(GofResult {
        statistic: d,
        p_value: ks_p_value(d, sample.len()),
        sample_size: sample.len(),
        law: law.to_string(),
    })
}

pub fn ks_test(sample: &[f64], law: &LimitLaw) -> Result<GofResult> {
    law.validate()?;
    ks_test_by(sample, &law.to_string(), |x| law.cdf(x))
}

/// KS test of p-values (or any sample) against Uniform(0, 1).
pub fn uniformity_test(sample: &[f64]) -> Result<GofResult> {
    ks_test_by(sample, "uniform(0,1)", |x| x.clamp(0.0, 1.0))
}

/// A chi-square cell covering counts `lo..=hi` (`hi = None` for the tail).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonCell {
    pub lo: u64,
    pub hi: Option<u64>,
    pub probability: f64,
}

impl PoissonCell {
    fn contains(&self, k: u64) -> bool {
        k >= self.lo && self.hi.is_none_or(|h| k <= h)
    }
}

/// `P(X >= k)` for `X ~ Poisson(mean)`.
fn poisson_upper_tail(mean: f64, k: u64) -> f64 {
    if k == 0 {
        1.0
    } else {
        reg_gamma_p(k as f64, mean)
    }
}

fn poisson_pmf(mean: f64, k: u64) -> f64 {
    (k as f64 * mean.ln() - mean - ln_factorial(k as u32)).exp()
}

/// Cells for a chi-square test of `total` Poisson(`mean`) counts, merged so
/// every expected count is at least 5. With fewer than 5 observations the
/// result is a single cell.
pub fn poisson_cells(mean: f64, total: usize) -> Result<Vec<PoissonCell>> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(invalid(format!(
            "Poisson mean must be positive, got {mean}"
        )));
    }
    let n = total as f64;
    let min_prob = 5.0 / n;
    // Tail cell starts at the largest k with n P(X >= k) >= 5.
    let mut tail_start = 0u64;
    while poisson_upper_tail(mean, tail_start + 1) >= min_prob {
        tail_start += 1;
    }
    let mut cells: Vec<PoissonCell> = Vec::new();
    let mut open_lo = 0u64;
    let mut acc = 0.0;
    for k in 0..tail_start {
        acc += poisson_pmf(mean, k);
        if acc >= min_prob {
            cells.push(PoissonCell {
                lo: open_lo,
                hi: Some(k),
                probability: acc,
            });
            open_lo = k + 1;
            acc = 0.0;
        }
    }
    // Leftover mass below the tail goes into the tail cell.
    cells.push(PoissonCell {
        lo: open_lo,
        hi: None,
        probability: acc + poisson_upper_tail(mean, tail_start),
    });
    Ok(cells)
}

/// Chi-square goodness of fit of `counts` to Poisson(`mean`).
pub fn poisson_count_test(counts: &[u64], mean: f64) -> Result<GofResult> {
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let cells = poisson_cells(mean, counts.len())?;
    let mut observed = vec![0u64; cells.len()];
    for &k in counts {
        // cells are contiguous and ordered; the tail cell catches the rest
        let idx = cells
            .iter()
            .position(|c| c.contains(k))
            .unwrap_or(cells.len() - 1);
        observed[idx] += 1;
    }
    let n = counts.len() as f64;
    let statistic: f64 = cells
        .iter()
        .zip(&observed)
        .map(|(c, &o)| {
            let e = n * c.probability;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = cells.len() - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        chi_square_sf(dof as f64, statistic)
    };
    Ok(GofResult {
        statistic,
        p_value,
        sample_size: counts.len(),
        law: format!("poisson(mean={mean})"),
    })
}

/// Mean, unbiased variance and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

impl Summary {
    pub fn of(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let count = sample.len();
        let n = count as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let variance = if count > 1 {
            sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok(Self {
            count,
            mean,
            variance,
            std_error: (variance / n).sqrt(),
        })
    }
}

/// Pearson correlation of two equally long samples.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(invalid("correlation needs samples of equal length"));
    }
    if x.len() < 2 {
        return Err(Error::EmptySample);
    }
    let mx = x.iter().sum::<f64>() / x.len() as f64;
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Sample correlation between increments `first` and `second`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementCorrelation {
    pub first: usize,
    pub second: usize,
    pub correlation: f64,
    /// `1 / sqrt(N)`, the null standard error.
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementTest {
    pub gof: GofResult,
    pub correlations: Vec<IncrementCorrelation>,
}

/// Transforms last-but vectors `(L_0, ..., L_m)` into the gaps
/// `S_{j+1} - S_j` of `S_{j+1} = e^{-L_j} / (r-1)!` (the inverse of `h`),
/// which are i.i.d. Exp(1) under the limit law.
pub fn lastbut_increments(vector: &[f64], r: u32) -> Vec<f64> {
    let lf = ln_factorial(r.saturating_sub(1));
    let mut prev = 0.0;
    vector
        .iter()
        .map(|&l| {
            let t = (-l - lf).exp();
            let d = t - prev;
            prev = t;
            d
        })
        .collect()
}

/// Pools the increments of all vectors and KS-tests them against Exp(1);
/// reports every pairwise cross-increment correlation.
pub fn increment_test(vectors: &[Vec<f64>], r: u32, m: usize) -> Result<IncrementTest> {
    if r < 1 {
        return Err(invalid("increment test needs r >= 1"));
    }
    if vectors.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(vectors.len()); m + 1];
    for v in vectors {
        if v.len() != m + 1 || v.iter().any(|x| !x.is_finite()) {
            return Err(invalid(format!(
                "expected {} finite values per vector",
                m + 1
            )));
        }
        if v.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid("last-but vectors must be nonincreasing"));
        }
        for (j, d) in lastbut_increments(v, r).into_iter().enumerate() {
            columns[j].push(d);
        }
    }
    let pooled: Vec<f64> = columns.iter().flatten().copied().collect();
    let gof = ks_test_by(&pooled, "exponential(1)", |x| {
        if x <= 0.0 {
            0.0
        } else {
            -(-x).exp_m1()
        }
    })?;
    let mut correlations = Vec::new();
    if vectors.len() >= 2 {
        let se = 1.0 / (vectors.len() as f64).sqrt();
        for a in 0..=m {
            for b in (a + 1)..=m {
                correlations.push(IncrementCorrelation {
                    first: a,
                    second: b,
                    correlation: correlation(&columns[a], &columns[b])?,
                    std_error: se,
                });
            }
        }
    }
    Ok(IncrementTest { gof, correlations })
}
