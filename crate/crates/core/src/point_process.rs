//! Finite point patterns and the transformations applied to them: the
//! centering map `psi(x) = x/n - ln n - (r-1) ln ln n`, interval counts,
//! last-but-`j` order statistics, the map `h(x) = -ln (r-1)! - ln x` with
//! its inverse, and the rare-type counting path.

use serde::{Deserialize, Serialize};

use crate::discrete::CollectorTrace;
use crate::error::{invalid, Error, Result};
use crate::samplers::Stream;
use crate::special::{factorial, ln_factorial};

/// Finite multiset of reals, kept sorted ascending.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    points: Vec<f64>,
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    Ok(())
}

impl PointPattern {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| p.is_nan()) {
            return Err(Error::Domain("NaN point".into()));
        }
        points.sort_unstable_by(f64::total_cmp);
        Ok(Self { points })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn mass(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn below(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p < x)
    }

    fn at_most(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p <= x)
    }

    /// Points in the closed interval `[lo, hi]`; `hi` may be `+inf`.
    pub fn count_closed(&self, lo: f64, hi: f64) -> Result<usize> {
        check_interval(lo, hi)?;
        Ok(self.at_most(hi) - self.below(lo))
    }

    /// Points in `(lo, hi]`.
    pub fn count_half_open(&self, lo: f64, hi: f64) -> Result<usize> {
        check_interval(lo, hi)?;
        Ok(self.at_most(hi) - self.at_most(lo))
    }

    /// Points in `[x, +inf)`.
    pub fn count_from(&self, x: f64) -> usize {
        self.points.len() - self.below(x)
    }

    /// `(L_0, ..., L_m)` where `L_j` is the `(j+1)`-th largest point.
    pub fn last_but(&self, m: usize) -> Result<Vec<f64>> {
        let len = self.points.len();
        if len <= m {
            return Err(Error::InsufficientPoints {
                available: len,
                required: m + 1,
            });
        }
        Ok((0..=m).map(|j| self.points[len - 1 - j]).collect())
    }

    /// Image under `h`; every point must be strictly positive.
    pub fn map_h(&self, r: u32) -> Result<PointPattern> {
        let h = MapH::new(r)?;
        let mut out = Vec::with_capacity(self.points.len());
        // h is decreasing, so walk backwards to stay sorted.
        for &x in self.points.iter().rev() {
            out.push(h.apply(x)?);
        }
        Ok(PointPattern { points: out })
    }

    /// Image under the inverse map `x -> e^{-x} / (r-1)!`.
    pub fn map_h_inverse(&self, r: u32) -> Result<PointPattern> {
        let h = MapH::new(r)?;
        let points = self.points.iter().rev().map(|&y| h.invert(y)).collect();
        Ok(PointPattern { points })
    }
}

/// The affine centering map for `n` types and multiplicity `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    n: usize,
    r: u32,
    shift: f64,
}

impl Normalization {
    pub fn new(n: usize, r: u32) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("normalization needs n >= 2, got {n}")));
        }
        if r < 1 {
            return Err(invalid("normalization needs r >= 1"));
        }
        let ln_n = (n as f64).ln();
        let shift = ln_n + (r - 1) as f64 * ln_n.ln();
        Ok(Self { n, r, shift })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `ln n + (r-1) ln ln n`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn apply(&self, x: f64) -> f64 {
        x / self.n as f64 - self.shift
    }

    /// Raw time corresponding to normalized position `y`.
    pub fn invert(&self, y: f64) -> f64 {
        self.n as f64 * (y + self.shift)
    }

    pub fn normalize(&self, raw: &[f64]) -> Result<PointPattern> {
        PointPattern::new(raw.iter().map(|&x| self.apply(x)).collect())
    }

    /// Pattern of normalized `r`-th arrival times of a discrete trace.
    pub fn normalize_trace(&self, trace: &CollectorTrace) -> Result<PointPattern> {
        if trace.n() != self.n {
            return Err(invalid("trace size does not match normalization"));
        }
        let col: Vec<f64> = trace
            .column(self.r)?
            .into_iter()
            .map(|y| y as f64)
            .collect();
        self.normalize(&col)
    }
}

/// `h(x) = -ln (r-1)! - ln x` on `(0, inf)`.
#[derive(Clone, Copy, Debug)]
pub struct MapH {
    ln_fact: f64,
    // (r-1)! when it is exact in f64
    fact: Option<f64>,
}

impl MapH {
    pub fn new(r: u32) -> Result<Self> {
        if r < 1 {
            return Err(invalid("h needs r >= 1"));
        }
        Ok(Self {
            ln_fact: ln_factorial(r - 1),
            fact: (r <= 19).then(|| factorial(r - 1)),
        })
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x <= 0.0 {
            return Err(Error::Domain(format!("h is defined on (0, inf), got {x}")));
        }
        Ok(match self.fact {
            Some(f) if (x * f).is_normal() => -(x * f).ln(),
            _ => -self.ln_fact - x.ln(),
        })
    }

    pub fn invert(&self, y: f64) -> f64 {
        match self.fact {
            Some(f) => (-y).exp() / f,
            None => (-y - self.ln_fact).exp(),
        }
    }
}

/// Counts of rare types at increasing thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RarePath {
    pub thresholds: Vec<f64>,
    pub counts: Vec<usize>,
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|x| x.is_nan()) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("thresholds must be strictly increasing"));
    }
    Ok(())
}

impl RarePath {
    /// `C(x)` as the mass of `pattern` on `[x, inf)`.
    pub fn from_pattern(pattern: &PointPattern, thresholds: &[f64]) -> Result<Self> {
        check_thresholds(thresholds)?;
        Ok(Self {
            thresholds: thresholds.to_vec(),
            counts: thresholds.iter().map(|&x| pattern.count_from(x)).collect(),
        })
    }

    /// `C(x) = #{i : Y(i, r) >= n x + n ln n + (r-1) n ln ln n}` read
    /// directly off the arrival matrix.
    pub fn from_trace(trace: &CollectorTrace, r: u32, thresholds: &[f64]) -> Result<Self> {
        check_thresholds(thresholds)?;
        let norm = Normalization::new(trace.n(), r)?;
        let mut col = trace.column(r)?;
        col.sort_unstable();
        let counts = thresholds
            .iter()
            .map(|&x| {
                let cut = norm.invert(x);
                col.len() - col.partition_point(|&y| (y as f64) < cut)
            })
            .collect();
        Ok(Self {
            thresholds: thresholds.to_vec(),
            counts,
        })
    }
}

/// One realization of the limiting Poisson process restricted to
/// `[lo, inf)`: a unit-rate Poisson process on `(0, h^{-1}(lo)]` pushed
/// through `h`.
pub fn sample_limit_process(r: u32, lo: f64, stream: &mut Stream) -> Result<PointPattern> {
    if !lo.is_finite() {
        return Err(invalid("window start must be finite"));
    }
    let h = MapH::new(r)?;
    let horizon = h.invert(lo);
    let mut arrivals = Vec::new();
    let mut t = stream.exponential();
    while t <= horizon {
        arrivals.push(t);
        t += stream.exponential();
    }
    let points = arrivals
        .iter()
        .rev()
        .map(|&x| h.apply(x))
        .collect::<Result<_>>()?;
    Ok(PointPattern { points })
}

/// The `m + 1` largest points of the limiting process, largest first:
/// `L_j = -ln (r-1)! - ln (E_1 + ... + E_{j+1})`.
pub fn sample_limit_last_but(r: u32, m: usize, stream: &mut Stream) -> Result<Vec<f64>> {
    let h = MapH::new(r)?;
    let mut t = 0.0;
    (0..=m)
        .map(|_| {
            t += stream.exponential();
            h.apply(t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::SeedSpec;

    fn pat(v: &[f64]) -> PointPattern {
        PointPattern::new(v.to_vec()).unwrap()
    }

    #[test]
    fn psi_values() {
        for n in [3usize, 10, 1000, 123_456] {
            let norm = Normalization::new(n, 1).unwrap();
            let x = n as f64 * (n as f64).ln();
            assert!(norm.apply(x).abs() < 1e-12);
        }
        let norm = Normalization::new(10, 2).unwrap();
        // -ln 10 - ln ln 10
        assert!((norm.apply(0.0) - (-3.136_617_538_242_002)).abs() < 1e-12);
        assert!(Normalization::new(1, 1).is_err());
        assert!(Normalization::new(2, 1).is_ok());
    }

    #[test]
    fn normalize_keeps_order_and_mass() {
        let norm = Normalization::new(7, 2).unwrap();
        let raw = [1.0, 4.0, 9.0, 30.0];
        let p = norm.normalize(&raw).unwrap();
        assert_eq!(p.mass(), 4);
        let expect: Vec<f64> = raw.iter().map(|&x| norm.apply(x)).collect();
        assert_eq!(p.points(), &expect[..]);
    }

    #[test]
    fn counting() {
        assert_eq!(pat(&[-1.0, 0.5, 2.0]).count_closed(0.0, 1.0).unwrap(), 1);
        assert_eq!(PointPattern::empty().count_closed(-5.0, 5.0).unwrap(), 0);
        assert_eq!(pat(&[0.0, 0.0, 1.0]).count_closed(0.0, 0.0).unwrap(), 2);
        assert_eq!(
            pat(&[0.0, 1.0, 2.0])
                .count_closed(1.0, f64::INFINITY)
                .unwrap(),
            2
        );
        assert_eq!(pat(&[0.0, 1.0, 2.0]).count_half_open(0.0, 2.0).unwrap(), 2);
        assert!(pat(&[1.0]).count_closed(1.0, 0.0).is_err());
        assert!(PointPattern::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn last_but_values() {
        assert_eq!(pat(&[1.0, 5.0, 3.0]).last_but(1).unwrap(), vec![5.0, 3.0]);
        assert!(matches!(
            pat(&[1.0, 2.0]).last_but(2),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn h_values() {
        assert_eq!(MapH::new(1).unwrap().apply(1.0).unwrap(), 0.0);
        assert!((MapH::new(3).unwrap().invert(0.0) - 0.5).abs() < 1e-15);
        assert!(MapH::new(2).unwrap().apply(0.0).is_err());
        assert!(pat(&[-1.0, 2.0]).map_h(1).is_err());
    }

    #[test]
    fn map_h_sorted_and_inverse() {
        let p = pat(&[0.1, 0.5, 2.0, 7.0]);
        let q = p.map_h(3).unwrap();
        assert!(q.points().windows(2).all(|w| w[0] <= w[1]));
        let back = q.map_h_inverse(3).unwrap();
        for (a, b) in back.points().iter().zip(p.points()) {
            assert!((a - b).abs() <= 8.0 * f64::EPSILON * b);
        }
    }

    #[test]
    fn rare_path_validation_and_limits() {
        let p = pat(&[-1.0, 0.0, 3.0]);
        assert!(RarePath::from_pattern(&p, &[1.0, 0.0]).is_err());
        assert!(RarePath::from_pattern(&p, &[0.0, 0.0]).is_err());
        let path = RarePath::from_pattern(&p, &[-100.0, 0.0, 10.0]).unwrap();
        assert_eq!(path.counts, vec![3, 2, 0]);
    }

    #[test]
    fn limit_process_window() {
        let mut s = SeedSpec::new(5, 0).stream();
        for _ in 0..100 {
            let p = sample_limit_process(2, -1.0, &mut s).unwrap();
            assert!(p.points().iter().all(|&x| x >= -1.0));
            assert!(p.points().windows(2).all(|w| w[0] <= w[1]));
        }
        assert!(sample_limit_process(1, f64::NEG_INFINITY, &mut s).is_err());
        let v = sample_limit_last_but(1, 4, &mut s).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.windows(2).all(|w| w[0] > w[1]));
    }
}
