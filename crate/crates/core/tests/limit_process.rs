use coupon_limits::limit_laws::{exact_poissonized_marginal_cdf, intensity_mass};
use coupon_limits::point_process::{sample_limit_last_but, sample_limit_process};
use coupon_limits::stats::{correlation, increment_test, ks_test_by, Summary};
use coupon_limits::{run_discrete, Normalization, SeedSpec};

fn counts(r: u32, lo: f64, hi: f64, reps: u64, seed: u64) -> Vec<f64> {
    (0..reps)
        .map(|j| {
            let p = sample_limit_process(r, lo, &mut SeedSpec::new(seed, j).stream()).unwrap();
            p.count_closed(lo, hi).unwrap() as f64
        })
        .collect()
}

#[test]
fn mean_count_above_zero() {
    let s = Summary::of(&counts(1, 0.0, f64::INFINITY, 100_000, 1)).unwrap();
    assert!(
        (s.mean - 1.0).abs() < 3.0 * s.std_error,
        "{} +- {}",
        s.mean,
        s.std_error
    );
}

#[test]
fn mean_count_on_bounded_window() {
    let hi = std::f64::consts::LN_2;
    assert!((intensity_mass(3, 0.0, hi).unwrap() - 0.25).abs() < 1e-15);
    let s = Summary::of(&counts(3, 0.0, hi, 100_000, 2)).unwrap();
    assert!(
        (s.mean - 0.25).abs() < 3.0 * s.std_error,
        "{} +- {}",
        s.mean,
        s.std_error
    );
}

#[test]
fn disjoint_counts_are_uncorrelated() {
    let reps = 20_000u64;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for j in 0..reps {
        let p = sample_limit_process(2, -1.0, &mut SeedSpec::new(3, j).stream()).unwrap();
        a.push(p.count_closed(-1.0, 0.0).unwrap() as f64);
        b.push(p.count_half_open(0.0, 2.0).unwrap() as f64);
    }
    let rho = correlation(&a, &b).unwrap();
    assert!(rho.abs() < 3.0 / (reps as f64).sqrt(), "rho = {rho}");
}

#[test]
fn top_points_agree_with_window_sampler() {
    // the largest point of the window sampler and L_0 share one law
    let reps = 20_000u64;
    let lo = -4.0;
    let mut tops = Vec::new();
    for j in 0..reps {
        let p = sample_limit_process(1, lo, &mut SeedSpec::new(4, j).stream()).unwrap();
        if let Ok(l) = p.last_but(0) {
            tops.push(l[0]);
        }
    }
    let g = ks_test_by(&tops, "top point given >= -4", |x| {
        let below = (-(-x).exp()).exp();
        let floor = (-(-lo).exp()).exp();
        ((below - floor) / (1.0 - floor)).max(0.0)
    })
    .unwrap();
    assert!(g.p_value > 1e-3, "{g:?}");
}

#[test]
fn limit_sampler_passes_increment_test() {
    let vectors: Vec<Vec<f64>> = (0..5000)
        .map(|j| sample_limit_last_but(2, 3, &mut SeedSpec::new(5, j).stream()).unwrap())
        .collect();
    let t = increment_test(&vectors, 2, 3).unwrap();
    assert!(t.gof.p_value > 1e-3, "{:?}", t.gof);
    for c in &t.correlations {
        assert!(c.correlation.abs() < 3.0 * c.std_error, "{c:?}");
    }
}

#[test]
fn exact_marginal_null_calibration() {
    let (n, r) = (100usize, 2u32);
    let norm = Normalization::new(n, r).unwrap();
    let trials = 200u64;
    let mut rejected = 0;
    for k in 0..trials {
        let mut s = SeedSpec::new(6, k).stream();
        let sample: Vec<f64> = (0..10_000)
            .map(|_| norm.apply(s.gamma(r, n).unwrap()))
            .collect();
        let g = ks_test_by(&sample, "exact marginal", |x| {
            exact_poissonized_marginal_cdf(n, r, x)
        })
        .unwrap();
        if g.p_value < 0.05 {
            rejected += 1;
        }
    }
    let frac = rejected as f64 / trials as f64;
    assert!((frac - 0.05).abs() <= 0.05, "rejection rate {frac}");
}

#[test]
fn increment_distance_shrinks_with_n() {
    let (r, m, reps) = (1u32, 2usize, 10_000u64);
    let distance = |n: usize| {
        let norm = Normalization::new(n, r).unwrap();
        let vectors: Vec<Vec<f64>> = (0..reps)
            .map(|j| {
                let t = run_discrete(n, r, SeedSpec::new(7, j)).unwrap();
                norm.normalize_trace(&t).unwrap().last_but(m).unwrap()
            })
            .collect();
        increment_test(&vectors, r, m).unwrap().gof.statistic
    };
    let (small, large) = (distance(100), distance(10_000));
    assert!(large < small, "{large} vs {small}");
}
