//! Closed-form reference laws.
//!
//! * `lambda_r(dx) = e^{-x} / (r-1)! dx`, the intensity of the limiting
//!   Poisson process of normalized `r`-th arrival times;
//! * the Gumbel-type law `exp(-e^{-x} / (c-1)!)` of the normalized time to
//!   assemble `c` collections;
//! * the law of `-ln (r-1)! - ln S_{m+1}` with `S_{m+1} ~ Gamma(m+1, 1)`,
//!   the limit of the normalized partial collection times;
//! * the law of `ln Q`, `Q ~ chi^2_{2m+2}`;
//! * the exact law of a normalized poissonized arrival time at finite `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special::{chi_square_cdf, ln_factorial, reg_gamma_p, reg_gamma_q, EULER_GAMMA};

/// A reference distribution on the real line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LimitLaw {
    /// Limiting Poisson process with intensity `lambda_r`. As a
    /// distribution it stands for the law of the process's largest point.
    PoissonIntensity {
        r: u32,
    },
    GumbelType {
        c: u32,
    },
    LogGamma {
        r: u32,
        m: u32,
    },
    ChiSqLog {
        m: u32,
    },
    ExactPoissonizedMarginal {
        n: usize,
        r: u32,
    },
}

impl fmt::Display for LimitLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PoissonIntensity { r } => write!(f, "poisson-intensity(r={r})"),
            Self::GumbelType { c } => write!(f, "gumbel-type(c={c})"),
            Self::LogGamma { r, m } => write!(f, "log-gamma(r={r},m={m})"),
            Self::ChiSqLog { m } => write!(f, "chisq-log(m={m})"),
            Self::ExactPoissonizedMarginal { n, r } => {
                write!(f, "exact-poissonized-marginal(n={n},r={r})")
            }
        }
    }
}

fn check_positive(name: &str, v: u32) -> Result<()> {
    if v < 1 {
        return Err(invalid(format!("{name} must be >= 1")));
    }
    Ok(())
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PoissonIntensity { r } | Self::LogGamma { r, .. } => check_positive("r", r),
            Self::GumbelType { c } => check_positive("c", c),
            Self::ChiSqLog { .. } => Ok(()),
            Self::ExactPoissonizedMarginal { n, r } => {
                if n < 2 {
                    return Err(invalid("exact marginal needs n >= 2"));
                }
                check_positive("r", r)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::PoissonIntensity { r } => gumbel_type_cdf(r, x),
            Self::GumbelType { c } => gumbel_type_cdf(c, x),
            Self::LogGamma { r, m } => log_gamma_cdf(r, m, x),
            Self::ChiSqLog { m } => chisq_log_cdf(m, x),
            Self::ExactPoissonizedMarginal { n, r } => exact_poissonized_marginal_cdf(n, r, x),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Self::PoissonIntensity { r } | Self::GumbelType { c: r } => {
                let t = (-x - ln_factorial(r - 1)).exp();
                t * (-t).exp()
            }
            Self::LogGamma { r, m } => {
                // S = e^{-x}/(r-1)! has Gamma(m+1) density; |dS/dx| = S.
                let t = -x - ln_factorial(r - 1);
                gamma_log_density(m, t)
            }
            Self::ChiSqLog { m } => {
                // Q/2 = e^y/2 has Gamma(m+1) density; |d(Q/2)/dy| = Q/2.
                gamma_log_density(m, x - std::f64::consts::LN_2)
            }
            Self::ExactPoissonizedMarginal { n, r } => exact_poissonized_marginal_density(n, r, x),
        }
    }

    /// Lower end of the support, `-inf` if unbounded.
    pub fn support_start(&self) -> f64 {
        match *self {
            Self::ExactPoissonizedMarginal { n, r } => -poissonized_shift(n, r),
            _ => f64::NEG_INFINITY,
        }
    }

    /// Inverse CDF by bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!(
                "quantile level must lie in (0, 1), got {p}"
            )));
        }
        let start = self.support_start();
        let mut lo = if start.is_finite() { start } else { -1.0 };
        let mut hi = lo + 2.0;
        let mut width = 2.0;
        while self.cdf(lo) > p {
            width *= 2.0;
            lo -= width;
        }
        while self.cdf(hi) < p {
            width *= 2.0;
            hi += width;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Density at `t = ln s` of `ln S`, `S ~ Gamma(m+1, 1)`: `s^{m+1} e^{-s} / m!`.
fn gamma_log_density(m: u32, t: f64) -> f64 {
    let s = t.exp();
    ((m + 1) as f64 * t - s - ln_factorial(m)).exp()
}

/// `lambda_r([lo, hi]) = (e^{-lo} - e^{-hi}) / (r-1)!`; `hi` may be `+inf`.
pub fn intensity_mass(r: u32, lo: f64, hi: f64) -> Result<f64> {
    check_positive("r", r)?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let lf = ln_factorial(r - 1);
    let upper = if hi == f64::INFINITY {
        0.0
    } else {
        (-hi - lf).exp()
    };
    Ok((-lo - lf).exp() - upper)
}

/// Intensity density `e^{-x} / (r-1)!`.
pub fn intensity_density(r: u32, x: f64) -> f64 {
    (-x - ln_factorial(r - 1)).exp()
}

/// `exp(-e^{-x} / (c-1)!)`.
pub fn gumbel_type_cdf(c: u32, x: f64) -> f64 {
    (-(-x - ln_factorial(c - 1)).exp()).exp()
}

/// `P(-ln (r-1)! - ln S_{m+1} <= x) = Q(m+1, e^{-x} / (r-1)!)`.
pub fn log_gamma_cdf(r: u32, m: u32, x: f64) -> f64 {
    reg_gamma_q((m + 1) as f64, (-x - ln_factorial(r - 1)).exp())
}

/// `P(ln Q <= y)` for `Q ~ chi^2_{2m+2}`.
pub fn chisq_log_cdf(m: u32, y: f64) -> f64 {
    chi_square_cdf((2 * m + 2) as f64, y.exp())
}

fn poissonized_shift(n: usize, r: u32) -> f64 {
    let ln_n = (n as f64).ln();
    ln_n + (r - 1) as f64 * ln_n.ln()
}

/// `P(psi(Z) <= x)` for `Z ~ Gamma(r, 1/n)`: `P(r, x + ln n + (r-1) ln ln n)`,
/// zero below the support.
pub fn exact_poissonized_marginal_cdf(n: usize, r: u32, x: f64) -> f64 {
    let s = x + poissonized_shift(n, r);
    if s <= 0.0 {
        0.0
    } else {
        reg_gamma_p(r as f64, s)
    }
}

/// Density of `psi(Z)`, `s^{r-1} e^{-s} / (r-1)!` at `s = x + ln n + (r-1) ln ln n`.
pub fn exact_poissonized_marginal_density(n: usize, r: u32, x: f64) -> f64 {
    let s = x + poissonized_shift(n, r);
    if s < 0.0 {
        return 0.0;
    }
    if r == 1 {
        return (-s).exp();
    }
    ((r - 1) as f64 * s.ln() - s - ln_factorial(r - 1)).exp()
}

/// Three-term expansion `n ln n + (c-1) n ln ln n + (gamma - ln (c-1)!) n`
/// of the mean time to assemble `c` collections.
pub fn er_expectation(n: usize, c: u32) -> Result<f64> {
    if n < 3 {
        return Err(invalid("expectation expansion needs n >= 3"));
    }
    check_positive("c", c)?;
    let nf = n as f64;
    let ln_n = nf.ln();
    Ok(nf * ln_n + (c - 1) as f64 * nf * ln_n.ln() + (EULER_GAMMA - ln_factorial(c - 1)) * nf)
}
