//! Declarative experiment descriptions and their file format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PoissonizedMarginal,
    Theorem1Counts,
    ErdosRenyi,
    PartialCollection,
    Chi2Law,
    RarePath,
    CouplingDecay,
    LimitConsistency,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::PoissonizedMarginal,
        Self::Theorem1Counts,
        Self::ErdosRenyi,
        Self::PartialCollection,
        Self::Chi2Law,
        Self::RarePath,
        Self::CouplingDecay,
        Self::LimitConsistency,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::PoissonizedMarginal => "poissonized-marginal",
            Self::Theorem1Counts => "theorem1-counts",
            Self::ErdosRenyi => "erdos-renyi",
            Self::PartialCollection => "partial-collection",
            Self::Chi2Law => "chi2-law",
            Self::RarePath => "rare-path",
            Self::CouplingDecay => "coupling-decay",
            Self::LimitConsistency => "limit-consistency",
        }
    }

    /// The limit statement a run of this kind checks.
    pub fn statement(&self) -> &'static str {
        match self {
            Self::PoissonizedMarginal => {
                "normalized poissonized arrival times follow the exact gamma marginal \
                 P(psi(Z) <= x) = P(r, x + ln n + (r-1) ln ln n)"
            }
            Self::Theorem1Counts => {
                "normalized r-th arrival times converge to a Poisson process with \
                 intensity e^{-x}/(r-1)! dx; interval counts are Poisson"
            }
            Self::ErdosRenyi => {
                "T_c/n - ln n - (c-1) ln ln n converges to exp(-e^{-x}/(c-1)!); \
                 E T_1 = n H_n"
            }
            Self::PartialCollection => {
                "normalized partial collection times converge to \
                 -ln (r-1)! - ln(E_1 + ... + E_{m+1}) jointly in m"
            }
            Self::Chi2Law => "2 exp(ln n - T_{1,m}/n) converges to chi-square with 2m+2 degrees",
            Self::RarePath => {
                "the count of x-rare types converges to N(e^{-x}/(r-1)!) for a \
                 unit-rate Poisson process N"
            }
            Self::CouplingDecay => {
                "discrete and poissonized point processes coupled on shared marks \
                 disagree on bounded intervals with vanishing probability"
            }
            Self::LimitConsistency => {
                "p-values of the battery tests are uniform under exact sampling \
                 from the limit laws"
            }
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// Closed interval `[lo, hi]`; a missing `hi` means `+inf`. Deserializes
/// from `{ lo, hi }` or from the string form `"lo:hi"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr")]
pub struct Interval {
    pub lo: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntervalRepr {
    Text(String),
    Table {
        lo: f64,
        #[serde(default)]
        hi: Option<f64>,
    },
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = Error;

    fn try_from(r: IntervalRepr) -> Result<Self> {
        match r {
            IntervalRepr::Text(s) => s.parse(),
            IntervalRepr::Table { lo, hi } => Ok(Self { lo, hi }),
        }
    }
}

impl Interval {
    pub fn new(lo: f64, hi: Option<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn upper(&self) -> f64 {
        self.hi.unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) => write!(f, "[{},{}]", self.lo, hi),
            None => write!(f, "[{},inf)", self.lo),
        }
    }
}

/// Parses `lo:hi`, with `hi` empty or `inf` for an unbounded interval.
impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse interval `{s}`, expected lo:hi"));
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi = match hi.trim() {
            "" | "inf" | "+inf" => None,
            h => Some(h.parse::<f64>().map_err(|_| bad())?),
        };
        Ok(Self { lo, hi })
    }
}

fn default_r() -> Vec<u32> {
    vec![1]
}

fn default_c() -> Vec<u32> {
    vec![1]
}

fn default_m() -> Vec<u32> {
    vec![0]
}

fn default_replications() -> u64 {
    1000
}

fn default_seed() -> u64 {
    42
}

pub const DEFAULT_SIGNIFICANCE: f64 = 1e-3;

fn default_significance() -> f64 {
    DEFAULT_SIGNIFICANCE
}

fn default_true() -> bool {
    true
}

/// One experiment. Replication `j` at grid position `g` uses stream index
/// `g * replications + j`, so results do not depend on `workers`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Report name; defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_r")]
    pub r: Vec<u32>,
    #[serde(default = "default_c")]
    pub c: Vec<u32>,
    #[serde(default = "default_m")]
    pub m: Vec<u32>,
    #[serde(default)]
    pub intervals: Vec<Interval>,
    #[serde(default)]
    pub thresholds: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_significance")]
    pub significance: f64,
    /// partial-collection: test the joint increments instead of marginals.
    #[serde(default = "default_true")]
    pub increments: bool,
    /// limit-consistency: sample size inside one trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial_size: Option<usize>,
    /// coupling-decay: also report how often some point moves by more
    /// than `n^{-epsilon_exponent}` between the two schemes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_exponent: Option<f64>,
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n_grid: Vec<usize>) -> Self {
        Self {
            kind,
            label: None,
            n_grid,
            r: default_r(),
            c: default_c(),
            m: default_m(),
            intervals: Vec::new(),
            thresholds: Vec::new(),
            replications: default_replications(),
            master_seed: default_seed(),
            significance: DEFAULT_SIGNIFICANCE,
            increments: true,
            trial_size: None,
            epsilon_exponent: None,
            workers: None,
        }
    }

    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("{}: {msg}", self.name())));
        let needs_n = self.kind != ExperimentKind::LimitConsistency;
        if needs_n && self.n_grid.is_empty() {
            return fail("n_grid is empty".into());
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 2) {
            return fail(format!("n_grid entries must be >= 2, got {n}"));
        }
        let min_n = match self.kind {
            ExperimentKind::ErdosRenyi | ExperimentKind::CouplingDecay => 3,
            _ => 2,
        };
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < min_n) {
            return fail(format!("{} needs n >= {min_n}, got {n}", self.kind));
        }
        if self.n_grid.iter().any(|&n| n > u32::MAX as usize) {
            return fail("n exceeds the supported number of types".into());
        }
        if self.replications < 1 {
            return fail("replications must be >= 1".into());
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return fail(format!(
                "significance must lie in (0, 1), got {}",
                self.significance
            ));
        }
        if self.r.is_empty() || self.r.contains(&0) {
            return fail("r values must be >= 1".into());
        }
        if self.c.is_empty() || self.c.contains(&0) {
            return fail("c values must be >= 1".into());
        }
        if self.m.is_empty() {
            return fail("m list is empty".into());
        }
        for iv in &self.intervals {
            if iv.lo.is_nan()
                || !iv.lo.is_finite()
                || iv.hi.is_some_and(|h| h.is_nan() || h <= iv.lo)
            {
                return fail(format!("bad interval {iv}"));
            }
        }
        if self.thresholds.iter().any(|x| !x.is_finite())
            || self.thresholds.windows(2).any(|w| w[0] >= w[1])
        {
            return fail("thresholds must be finite and strictly increasing".into());
        }
        match self.kind {
            ExperimentKind::CouplingDecay if self.intervals.is_empty() => {
                return fail("coupling-decay needs at least one interval".into());
            }
            ExperimentKind::CouplingDecay if self.intervals.iter().any(|iv| iv.hi.is_none()) => {
                return fail("coupling-decay intervals must be bounded".into());
            }
            ExperimentKind::RarePath if self.thresholds.is_empty() => {
                return fail("rare-path needs thresholds".into());
            }
            ExperimentKind::PartialCollection | ExperimentKind::LimitConsistency
                if self.increments && self.m.iter().any(|&m| m == 0) =>
            {
                return fail("increment tests need m >= 1".into());
            }
            ExperimentKind::LimitConsistency if self.trial_size == Some(0) => {
                return fail("trial_size must be >= 1".into());
            }
            _ => {}
        }
        if let Some(e) = self.epsilon_exponent {
            if !(e > 0.0 && e.is_finite()) {
                return fail(format!("epsilon_exponent must be positive, got {e}"));
            }
        }
        if self.workers == Some(0) {
            return fail("workers must be >= 1".into());
        }
        Ok(())
    }
}

/// Contents of a config file: a list of `[[experiment]]` tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "experiment", default)]
    pub experiments: Vec<ExperimentConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if file.experiments.is_empty() {
            return Err(Error::Config("no [[experiment]] entries".into()));
        }
        for e in &file.experiments {
            e.validate()?;
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Command-line overrides applied on top of every experiment in a file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub kind: Option<ExperimentKind>,
    pub n_grid: Option<Vec<usize>>,
    pub r: Option<Vec<u32>>,
    pub c: Option<Vec<u32>>,
    pub m: Option<Vec<u32>>,
    pub intervals: Option<Vec<Interval>>,
    pub thresholds: Option<Vec<f64>>,
    pub replications: Option<u64>,
    pub master_seed: Option<u64>,
    pub significance: Option<f64>,
    pub trial_size: Option<usize>,
    pub epsilon_exponent: Option<f64>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(k) = self.kind {
            cfg.kind = k;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        set!(
            n_grid,
            r,
            c,
            m,
            intervals,
            thresholds,
            replications,
            master_seed,
            significance
        );
        if self.trial_size.is_some() {
            cfg.trial_size = self.trial_size;
        }
        if self.epsilon_exponent.is_some() {
            cfg.epsilon_exponent = self.epsilon_exponent;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
    }

    /// Builds a config from flags alone; `kind` and `n_grid` are required.
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let kind = self
            .kind
            .ok_or_else(|| Error::Config("--kind is required".into()))?;
        let n_grid = match (&self.n_grid, kind) {
            (Some(n), _) => n.clone(),
            (None, ExperimentKind::LimitConsistency) => Vec::new(),
            (None, _) => return Err(Error::Config("--n is required".into())),
        };
        let mut cfg = ExperimentConfig::new(kind, n_grid);
        self.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}
