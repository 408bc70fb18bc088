//! One runner per experiment kind.

use super::calibration::{
    ks_monotone_slack, ks_tolerance, CalibratedLaw, MISMATCH_CEILING, MISMATCH_CEILING_MIN_N,
};
use super::config::{ExperimentConfig, ExperimentKind, Interval};
use super::report::{Rule, Series, StatEntry};
use super::Replicator;
use crate::discrete::run_discrete;
use crate::error::{invalid, Result};
use crate::limit_laws::{intensity_mass, LimitLaw};
use crate::point_process::{sample_limit_last_but, Normalization, RarePath};
use crate::poissonized::run_coupled;
use crate::special::ln_factorial;
use crate::stats::{
    increment_test, ks_test, poisson_count_test, uniformity_test, GofResult, Summary,
};

pub(crate) struct KindOutput {
    pub entries: Vec<StatEntry>,
    pub series: Vec<Series>,
    pub total_draws: u64,
}

impl KindOutput {
    fn new() -> Self {
        Self {
            entries: Vec::new(),
            series: Vec::new(),
            total_draws: 0,
        }
    }
}

pub(crate) fn run(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    match cfg.kind {
        ExperimentKind::PoissonizedMarginal => poissonized_marginal(cfg, rep),
        ExperimentKind::Theorem1Counts => theorem1_counts(cfg, rep),
        ExperimentKind::ErdosRenyi => erdos_renyi(cfg, rep),
        ExperimentKind::PartialCollection => partial_collection(cfg, rep),
        ExperimentKind::Chi2Law => chi2_law(cfg, rep),
        ExperimentKind::RarePath => rare_path(cfg, rep),
        ExperimentKind::CouplingDecay => coupling_decay(cfg, rep),
        ExperimentKind::LimitConsistency => limit_consistency(cfg, rep),
    }
}

fn max_of(v: &[u32]) -> u32 {
    v.iter().copied().max().unwrap_or(1)
}

fn gof_entry(name: impl Into<String>, g: GofResult, rule: Rule) -> StatEntry {
    StatEntry::new(name, g.statistic, g.sample_size, rule)
        .with_p(g.p_value)
        .law(g.law)
}

fn pass_at(sig: f64) -> Rule {
    Rule::PValueAtLeast { significance: sig }
}

/// Calibrated bound if available, otherwise report-only.
fn calibrated(law: CalibratedLaw, n: usize, sample_size: usize, sig: f64) -> Rule {
    match ks_tolerance(law, n, sample_size, sig) {
        Some(bound) => Rule::ValueAtMost { bound },
        None => Rule::Info,
    }
}

/// `(mean - target) / std_error`, kept finite.
fn z_score(summary: &Summary, target: f64) -> f64 {
    let diff = summary.mean - target;
    if summary.std_error > 0.0 {
        diff / summary.std_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::MAX.copysign(diff)
    }
}

fn fmt_x(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn interval_label(iv: &Interval) -> String {
    format!("lo={} hi={}", fmt_x(iv.lo), fmt_x(iv.upper()))
}

/// Pushes a `<name>_change` entry for each consecutive pair of grid
/// points: the later statistic minus the earlier one.
fn regression_pairs(
    out: &mut Vec<StatEntry>,
    name: &str,
    points: &[(usize, f64, usize)],
    rule_for: impl Fn(usize, usize) -> Rule,
    tag: impl Fn(StatEntry) -> StatEntry,
) {
    for w in points.windows(2) {
        let (n0, v0, s0) = w[0];
        let (n1, v1, s1) = w[1];
        let entry = StatEntry::new(
            format!("{name}_change"),
            v1 - v0,
            s0.min(s1),
            rule_for(s0, s1),
        )
        .n(n1)
        .law(format!("versus n={n0}"));
        out.push(tag(entry));
    }
}

fn ks_slack_rule(s0: usize, s1: usize) -> Rule {
    Rule::ValueAtMost {
        bound: ks_monotone_slack(s0.min(s1)),
    }
}

fn poissonized_marginal(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    let rmax = max_of(&cfg.r);
    let mut out = KindOutput::new();
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        let runs = rep.run(g, |seed| {
            let trace = run_coupled(n, rmax, seed)?;
            let cols = cfg
                .r
                .iter()
                .map(|&r| {
                    let norm = Normalization::new(n, r)?;
                    Ok(trace
                        .time_column(r)?
                        .into_iter()
                        .map(|z| norm.apply(z))
                        .collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            Ok((cols, trace.total_draws()))
        })?;
        out.total_draws += runs.iter().map(|r| r.1).sum::<u64>();
        for (k, &r) in cfg.r.iter().enumerate() {
            let pooled: Vec<f64> = runs
                .iter()
                .flat_map(|run| run.0[k].iter().copied())
                .collect();
            let law = LimitLaw::ExactPoissonizedMarginal { n, r };
            let g = ks_test(&pooled, &law)?;
            out.entries.push(
                gof_entry("ks_exact_marginal", g, pass_at(cfg.significance))
                    .n(n)
                    .r(r),
            );
        }
    }
    Ok(out)
}

fn theorem1_counts(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    let rmax = max_of(&cfg.r);
    let mut out = KindOutput::new();
    let mut top_ks: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); cfg.r.len()];
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        // per replication and r: (largest normalized point, interval counts)
        let runs = rep.run(g, |seed| {
            let trace = run_discrete(n, rmax, seed)?;
            let per_r = cfg
                .r
                .iter()
                .map(|&r| {
                    let norm = Normalization::new(n, r)?;
                    let points: Vec<f64> = trace
                        .column(r)?
                        .into_iter()
                        .map(|y| norm.apply(y as f64))
                        .collect();
                    let top = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let counts = cfg
                        .intervals
                        .iter()
                        .map(|iv| {
                            let inside = |x: &&f64| (iv.lo..=iv.upper()).contains(*x);
                            points.iter().filter(inside).count() as u64
                        })
                        .collect::<Vec<u64>>();
                    Ok((top, counts))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((per_r, trace.total_draws()))
        })?;
        out.total_draws += runs.iter().map(|r| r.1).sum::<u64>();
        for (k, &r) in cfg.r.iter().enumerate() {
            for (q, iv) in cfg.intervals.iter().enumerate() {
                let counts: Vec<u64> = runs.iter().map(|run| run.0[k].1[q]).collect();
                let mean = intensity_mass(r, iv.lo, iv.upper())?;
                let label = interval_label(iv);
                let g = poisson_count_test(&counts, mean)?;
                out.entries.push(
                    gof_entry(format!("count_chi2 {label}"), g, pass_at(cfg.significance))
                        .n(n)
                        .r(r),
                );
                let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
                let s = Summary::of(&as_f64)?;
                out.entries.push(
                    StatEntry::new(format!("mean_count {label}"), s.mean, s.count, Rule::Info)
                        .n(n)
                        .r(r)
                        .law(format!("intensity mass {mean}")),
                );
            }
            let tops: Vec<f64> = runs.iter().map(|run| run.0[k].0).collect();
            let g = ks_test(&tops, &LimitLaw::PoissonIntensity { r })?;
            top_ks[k].push((n, g.statistic, g.sample_size));
            out.entries
                .push(gof_entry("ks_top_point", g, Rule::Info).n(n).r(r));
        }
    }
    for (k, &r) in cfg.r.iter().enumerate() {
        regression_pairs(
            &mut out.entries,
            "ks_top_point",
            &top_ks[k],
            |_, _| Rule::ValueBelow { bound: 0.0 },
            |e| e.r(r),
        );
    }
    Ok(out)
}

/// `n H_n`, the exact mean time to collect all `n` types.
pub(crate) fn exact_mean_collection_time(n: usize) -> f64 {
    let h: f64 = (1..=n).rev().map(|k| 1.0 / k as f64).sum();
    n as f64 * h
}

fn erdos_renyi(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    let cmax = max_of(&cfg.c);
    let mut out = KindOutput::new();
    let mut ks: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); cfg.c.len()];
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        let runs = rep.run(g, |seed| {
            let trace = run_discrete(n, cmax, seed)?;
            let times = cfg
                .c
                .iter()
                .map(|&c| trace.collection_time(c))
                .collect::<Result<Vec<u64>>>()?;
            Ok((times, trace.total_draws()))
        })?;
        out.total_draws += runs.iter().map(|r| r.1).sum::<u64>();
        for (k, &c) in cfg.c.iter().enumerate() {
            let raw: Vec<f64> = runs.iter().map(|run| run.0[k] as f64).collect();
            let norm = Normalization::new(n, c)?;
            let sample: Vec<f64> = raw.iter().map(|&t| norm.apply(t)).collect();
            let g = ks_test(&sample, &LimitLaw::GumbelType { c })?;
            let rule = calibrated(
                CalibratedLaw::Gumbel { c },
                n,
                g.sample_size,
                cfg.significance,
            );
            ks[k].push((n, g.statistic, g.sample_size));
            out.entries.push(gof_entry("ks_gumbel", g, rule).n(n).c(c));

            let s = Summary::of(&raw)?;
            out.entries.push(
                StatEntry::new("mean_collection_time", s.mean, s.count, Rule::Info)
                    .n(n)
                    .c(c),
            );
            let expansion = crate::limit_laws::er_expectation(n, c)?;
            if c == 1 {
                let exact = exact_mean_collection_time(n);
                out.entries.push(
                    StatEntry::new(
                        "mean_z_vs_exact",
                        z_score(&s, exact),
                        s.count,
                        Rule::AbsAtMost { bound: 3.0 },
                    )
                    .n(n)
                    .c(c)
                    .law(format!("n H_n = {exact}")),
                );
                out.entries.push(
                    StatEntry::new(
                        "expansion_minus_exact",
                        expansion - exact,
                        0,
                        Rule::AbsAtMost { bound: 1.0 },
                    )
                    .n(n)
                    .c(c),
                );
            } else {
                out.entries.push(
                    StatEntry::new(
                        "mean_minus_expansion_per_n",
                        (s.mean - expansion) / n as f64,
                        s.count,
                        Rule::Info,
                    )
                    .n(n)
                    .c(c),
                );
            }
        }
    }
    for (k, &c) in cfg.c.iter().enumerate() {
        regression_pairs(&mut out.entries, "ks_gumbel", &ks[k], ks_slack_rule, |e| {
            e.c(c)
        });
    }
    Ok(out)
}

fn check_m_below_n(cfg: &ExperimentConfig) -> Result<()> {
    let mmax = max_of(&cfg.m) as usize;
    if let Some(&n) = cfg.n_grid.iter().find(|&&n| n <= mmax) {
        return Err(invalid(format!("m = {mmax} needs n > m, got n = {n}")));
    }
    Ok(())
}

fn partial_collection(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    check_m_below_n(cfg)?;
    let rmax = max_of(&cfg.r);
    let mmax = max_of(&cfg.m) as usize;
    let mut out = KindOutput::new();
    // keyed by (r index, m index)
    let mut ks: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); cfg.r.len() * cfg.m.len()];
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        // per replication and r: (L_0, ..., L_mmax)
        let runs = rep.run(g, |seed| {
            let trace = run_discrete(n, rmax, seed)?;
            let per_r = cfg
                .r
                .iter()
                .map(|&r| {
                    let norm = Normalization::new(n, r)?;
                    Ok(trace
                        .partial_collection_times(r, mmax)?
                        .into_iter()
                        .map(|t| norm.apply(t as f64))
                        .collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            Ok((per_r, trace.total_draws()))
        })?;
        out.total_draws += runs.iter().map(|r| r.1).sum::<u64>();
        for (k, &r) in cfg.r.iter().enumerate() {
            for (q, &m) in cfg.m.iter().enumerate() {
                let mu = m as usize;
                let (entry, stat, size) = if cfg.increments {
                    let vectors: Vec<Vec<f64>> =
                        runs.iter().map(|run| run.0[k][..=mu].to_vec()).collect();
                    let t = increment_test(&vectors, r, mu)?;
                    for c in &t.correlations {
                        out.entries.push(
                            StatEntry::new(
                                format!("increment_corr {}-{}", c.first, c.second),
                                c.correlation,
                                vectors.len(),
                                Rule::AbsAtMost {
                                    bound: 3.0 * c.std_error,
                                },
                            )
                            .n(n)
                            .r(r)
                            .m(m),
                        );
                    }
                    let (stat, size) = (t.gof.statistic, t.gof.sample_size);
                    (
                        gof_entry("increment_ks", t.gof, pass_at(cfg.significance)),
                        stat,
                        size,
                    )
                } else {
                    let sample: Vec<f64> = runs.iter().map(|run| run.0[k][mu]).collect();
                    let g = ks_test(&sample, &LimitLaw::LogGamma { r, m })?;
                    let rule = calibrated(
                        CalibratedLaw::LogGamma { r, m },
                        n,
                        g.sample_size,
                        cfg.significance,
                    );
                    let (stat, size) = (g.statistic, g.sample_size);
                    (gof_entry("ks_log_gamma", g, rule), stat, size)
                };
                ks[k * cfg.m.len() + q].push((n, stat, size));
                out.entries.push(entry.n(n).r(r).m(m));
            }
        }
    }
    let name = if cfg.increments {
        "increment_ks"
    } else {
        "ks_log_gamma"
    };
    for (k, &r) in cfg.r.iter().enumerate() {
        for (q, &m) in cfg.m.iter().enumerate() {
            regression_pairs(
                &mut out.entries,
                name,
                &ks[k * cfg.m.len() + q],
                ks_slack_rule,
                |e| e.r(r).m(m),
            );
        }
    }
    Ok(out)
}

fn chi2_law(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    check_m_below_n(cfg)?;
    let mmax = max_of(&cfg.m) as usize;
    let mut out = KindOutput::new();
    let mut ks: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); cfg.m.len()];
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        let runs = rep.run(g, |seed| {
            let trace = run_discrete(n, 1, seed)?;
            Ok((
                trace.partial_collection_times(1, mmax)?,
                trace.total_draws(),
            ))
        })?;
        out.total_draws += runs.iter().map(|r| r.1).sum::<u64>();
        let nf = n as f64;
        for (q, &m) in cfg.m.iter().enumerate() {
            let sample: Vec<f64> = runs
                .iter()
                .map(|run| (2.0 * nf).ln() - run.0[m as usize] as f64 / nf)
                .collect();
            let g = ks_test(&sample, &LimitLaw::ChiSqLog { m })?;
            let rule = calibrated(
                CalibratedLaw::ChiSqLog { m },
                n,
                g.sample_size,
                cfg.significance,
            );
            ks[q].push((n, g.statistic, g.sample_size));
            out.entries
                .push(gof_entry("ks_chi2_log", g, rule).n(n).m(m));
        }
    }
    for (q, &m) in cfg.m.iter().enumerate() {
        regression_pairs(
            &mut out.entries,
            "ks_chi2_log",
            &ks[q],
            ks_slack_rule,
            |e| e.m(m),
        );
    }
    Ok(out)
}

fn rare_path(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    let rmax = max_of(&cfg.r);
    let xs = &cfg.thresholds;
    let mut out = KindOutput::new();
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        // per replication and r: (path counts, whether the pattern disagrees)
        let runs = rep.run(g, |seed| {
            let trace = run_discrete(n, rmax, seed)?;
            let per_r = cfg
                .r
                .iter()
                .map(|&r| {
                    let path = RarePath::from_trace(&trace, r, xs)?;
                    let pattern = Normalization::new(n, r)?.normalize_trace(&trace)?;
                    let via_pattern = RarePath::from_pattern(&pattern, xs)?;
                    let differs = path != via_pattern;
                    Ok((path.counts, differs))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((per_r, trace.total_draws()))
        })?;
        out.total_draws += runs.iter().map(|r| r.1).sum::<u64>();
        for (k, &r) in cfg.r.iter().enumerate() {
            let lf = ln_factorial(r - 1);
            let column =
                |q: usize| -> Vec<u64> { runs.iter().map(|run| run.0[k].0[q] as u64).collect() };
            let mut rows = Vec::new();
            for (q, &x) in xs.iter().enumerate() {
                let counts = column(q);
                let mean = (-x - lf).exp();
                let g = poisson_count_test(&counts, mean)?;
                out.entries.push(
                    gof_entry(
                        format!("rare_count_chi2 x={x}"),
                        g,
                        pass_at(cfg.significance),
                    )
                    .n(n)
                    .r(r),
                );
                let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
                let s = Summary::of(&as_f64)?;
                out.entries.push(
                    StatEntry::new(
                        format!("rare_mean_z x={x}"),
                        z_score(&s, mean),
                        s.count,
                        Rule::AbsAtMost { bound: 3.0 },
                    )
                    .n(n)
                    .r(r)
                    .law(format!("mean {mean}")),
                );
                rows.push(vec![x, s.mean]);
            }
            for q in 0..xs.len().saturating_sub(1) {
                let (a, b) = (column(q), column(q + 1));
                let diffs: Vec<u64> = a.iter().zip(&b).map(|(&u, &v)| u - v).collect();
                let mean = intensity_mass(r, xs[q], xs[q + 1])?;
                let g = poisson_count_test(&diffs, mean)?;
                out.entries.push(
                    gof_entry(
                        format!("rare_increment_chi2 x={}..{}", xs[q], xs[q + 1]),
                        g,
                        pass_at(cfg.significance),
                    )
                    .n(n)
                    .r(r),
                );
            }
            let violations = runs.iter().filter(|run| run.0[k].1).count();
            out.entries.push(
                StatEntry::new(
                    "path_identity_violations",
                    violations as f64,
                    runs.len(),
                    Rule::ValueAtMost { bound: 0.0 },
                )
                .n(n)
                .r(r),
            );
            out.series.push(Series {
                name: format!("mean_count n={n} r={r}"),
                columns: vec!["x".into(), "mean_count".into()],
                rows,
            });
        }
    }
    Ok(out)
}

fn coupling_decay(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    let rmax = max_of(&cfg.r);
    let mut out = KindOutput::new();
    let width = cfg.intervals.len();
    let mut freq: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); cfg.r.len() * width];
    let largest = cfg.n_grid.iter().copied().max().unwrap_or(0);
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        let eps = cfg.epsilon_exponent.map(|a| (n as f64).powf(-a));
        // per replication and r: (mismatch per interval, deviation > eps)
        let runs = rep.run(g, |seed| {
            let trace = run_coupled(n, rmax, seed)?;
            let per_r = cfg
                .r
                .iter()
                .map(|&r| {
                    let differ = cfg
                        .intervals
                        .iter()
                        .map(|iv| trace.counts_differ(r, iv.lo, iv.upper()))
                        .collect::<Result<Vec<bool>>>()?;
                    let far = match eps {
                        Some(e) => trace.max_normalized_deviation(r)? > e,
                        None => false,
                    };
                    Ok((differ, far))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((per_r, trace.total_draws()))
        })?;
        out.total_draws += runs.iter().map(|r| r.1).sum::<u64>();
        let reps = runs.len();
        for (k, &r) in cfg.r.iter().enumerate() {
            for (q, iv) in cfg.intervals.iter().enumerate() {
                let hits = runs.iter().filter(|run| run.0[k].0[q]).count();
                let f = hits as f64 / reps as f64;
                let rule = if n >= MISMATCH_CEILING_MIN_N && n == largest {
                    Rule::ValueBelow {
                        bound: MISMATCH_CEILING,
                    }
                } else {
                    Rule::Info
                };
                freq[k * width + q].push((n, f, reps));
                out.entries.push(
                    StatEntry::new(
                        format!("mismatch_frequency {}", interval_label(iv)),
                        f,
                        reps,
                        rule,
                    )
                    .n(n)
                    .r(r),
                );
            }
            if let Some(e) = eps {
                let far = runs.iter().filter(|run| run.0[k].1).count();
                out.entries.push(
                    StatEntry::new(
                        "deviation_exceeds_eps",
                        far as f64 / reps as f64,
                        reps,
                        Rule::Info,
                    )
                    .n(n)
                    .r(r)
                    .law(format!("eps = {e}")),
                );
            }
        }
    }
    for (k, &r) in cfg.r.iter().enumerate() {
        for (q, iv) in cfg.intervals.iter().enumerate() {
            let points = &freq[k * width + q];
            for w in points.windows(2) {
                let ((n0, f0, s0), (n1, f1, s1)) = (w[0], w[1]);
                let se = (f0 * (1.0 - f0) / s0 as f64 + f1 * (1.0 - f1) / s1 as f64).sqrt();
                out.entries.push(
                    StatEntry::new(
                        format!("mismatch_frequency_change {}", interval_label(iv)),
                        f1 - f0,
                        s0.min(s1),
                        Rule::ValueAtMost { bound: 2.0 * se },
                    )
                    .n(n1)
                    .r(r)
                    .law(format!("versus n={n0}")),
                );
            }
        }
    }
    Ok(out)
}

pub(crate) const DEFAULT_TRIAL_SIZE: usize = 1000;
/// Level at which null rejections are counted.
pub(crate) const NULL_LEVEL: f64 = 0.05;
/// Accepted range of the null rejection rate: `0.05 +- 0.05`.
pub(crate) const NULL_RATE_RANGE: (f64, f64) = (0.0, 0.10);

fn limit_consistency(cfg: &ExperimentConfig, rep: &Replicator) -> Result<KindOutput> {
    let size = cfg.trial_size.unwrap_or(DEFAULT_TRIAL_SIZE);
    let mut out = KindOutput::new();
    let mut block = 0;
    for &r in &cfg.r {
        for &m in &cfg.m {
            let mu = m as usize;
            let with_increments = cfg.increments && m >= 1;
            // per trial: p-values of (top point, L_m marginal, increments)
            let trials = rep.run(block, |seed| {
                let mut stream = seed.stream();
                let vectors = (0..size)
                    .map(|_| sample_limit_last_but(r, mu, &mut stream))
                    .collect::<Result<Vec<_>>>()?;
                let tops: Vec<f64> = vectors.iter().map(|v| v[0]).collect();
                let last: Vec<f64> = vectors.iter().map(|v| v[mu]).collect();
                let mut p = vec![
                    ks_test(&tops, &LimitLaw::PoissonIntensity { r })?.p_value,
                    ks_test(&last, &LimitLaw::LogGamma { r, m })?.p_value,
                ];
                if with_increments {
                    p.push(increment_test(&vectors, r, mu)?.gof.p_value);
                }
                Ok(p)
            })?;
            block += 1;
            let mut families = vec!["top_point", "last_but_marginal"];
            if with_increments {
                families.push("increments");
            }
            for (f, family) in families.iter().enumerate() {
                let ps: Vec<f64> = trials.iter().map(|t| t[f]).collect();
                let rate = ps.iter().filter(|&&p| p < NULL_LEVEL).count() as f64 / ps.len() as f64;
                out.entries.push(
                    StatEntry::new(
                        format!("null_rejection_rate {family}"),
                        rate,
                        ps.len(),
                        Rule::InRange {
                            lo: NULL_RATE_RANGE.0,
                            hi: NULL_RATE_RANGE.1,
                        },
                    )
                    .r(r)
                    .m(m)
                    .law(format!("fraction of p < {NULL_LEVEL}")),
                );
                let g = uniformity_test(&ps)?;
                out.entries.push(
                    gof_entry(
                        format!("null_p_uniformity {family}"),
                        g,
                        pass_at(cfg.significance),
                    )
                    .r(r)
                    .m(m),
                );
            }
        }
    }
    Ok(out)
}
