use coupon_limits::special::{chi_square_sf, ln_factorial};
use coupon_limits::stats::{correlation, ks_critical_value, ks_test_by, Summary};
use coupon_limits::{SeedSpec, Stream};

const MILLION: usize = 1_000_000;

fn stream(seed: u64) -> Stream {
    SeedSpec::new(seed, 0).stream()
}

/// Pearson chi-square p-value of observed counts against expected counts.
fn chi_square_p(observed: &[f64], expected: &[f64]) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    chi_square_sf((observed.len() - 1) as f64, stat)
}

/// Sample variance with the standard error of that estimate.
fn variance_with_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    (m2 * n / (n - 1.0), ((m4 - m2 * m2) / n).sqrt())
}

#[test]
fn exponential_moments_and_median() {
    let mut s = stream(1);
    let x: Vec<f64> = (0..MILLION).map(|_| s.exponential()).collect();
    let sum = Summary::of(&x).unwrap();
    assert!((sum.mean - 1.0).abs() < 0.004, "mean {}", sum.mean);
    assert!(
        (sum.variance - 1.0).abs() < 0.01,
        "variance {}",
        sum.variance
    );
    let above = x.iter().filter(|&&v| v > std::f64::consts::LN_2).count() as f64 / x.len() as f64;
    assert!((above - 0.5).abs() < 0.0015, "P(E > ln 2) = {above}");
}

#[test]
fn exponential_ks() {
    let mut s = stream(2);
    let x: Vec<f64> = (0..100_000).map(|_| s.exponential()).collect();
    let g = ks_test_by(&x, "exp", |v| if v <= 0.0 { 0.0 } else { -(-v).exp_m1() }).unwrap();
    assert!(g.p_value > 1e-3, "{g:?}");
}

#[test]
fn uniform_type_two_values() {
    let mut s = stream(3);
    let ones = (0..MILLION)
        .filter(|_| s.uniform_type(2).unwrap() == 1)
        .count();
    let f = ones as f64 / MILLION as f64;
    assert!((f - 0.5).abs() < 0.0015, "{f}");
}

#[test]
fn uniform_type_chi_square() {
    let mut s = stream(4);
    let mut counts = [0f64; 10];
    for _ in 0..MILLION {
        counts[s.uniform_type(10).unwrap() - 1] += 1.0;
    }
    let p = chi_square_p(&counts, &[MILLION as f64 / 10.0; 10]);
    assert!(p > 1e-3, "p = {p}");
    assert!(s.uniform_type(1).is_err());
}

fn negbin_pmf(r: u32, n: usize, k: u64) -> f64 {
    // C(k-1, r-1) n^{-r} (1 - 1/n)^{k-r}
    let q = 1.0 / n as f64;
    let ln_choose =
        ln_factorial(k as u32 - 1) - ln_factorial(r - 1) - ln_factorial((k - r as u64) as u32);
    (ln_choose + r as f64 * q.ln() + (k - r as u64) as f64 * (-q).ln_1p()).exp()
}

/// Chi-square test of negative binomial draws against the exact pmf, cells
/// merged left to right until each expects at least 5.
fn negbin_gof(r: u32, n: usize, draws: &[u64]) -> f64 {
    let total = draws.len() as f64;
    let kmax = *draws.iter().max().unwrap();
    let mut hist = vec![0f64; kmax as usize + 1];
    for &k in draws {
        hist[k as usize] += 1.0;
    }
    let (mut obs, mut exp) = (Vec::new(), Vec::new());
    let (mut o, mut e) = (0.0, 0.0);
    let mut cum = 0.0;
    for k in r as u64..=kmax {
        let p = negbin_pmf(r, n, k);
        cum += p;
        o += hist[k as usize];
        e += total * p;
        if e >= 5.0 && total * (1.0 - cum) >= 5.0 {
            obs.push(o);
            exp.push(e);
            o = 0.0;
            e = 0.0;
        }
    }
    // remaining mass, including everything beyond kmax
    obs.push(o);
    exp.push(e + total * (1.0 - cum).max(0.0));
    chi_square_p(&obs, &exp)
}

#[test]
fn negbin_means() {
    let mut s = stream(5);
    for &(r, n) in &[(1u32, 100usize), (3, 50)] {
        let x: Vec<f64> = (0..MILLION)
            .map(|_| s.negbin_trials(r, n).unwrap() as f64)
            .collect();
        let sum = Summary::of(&x).unwrap();
        let target = (r as usize * n) as f64;
        assert!(
            (sum.mean - target).abs() < 3.0 * sum.std_error,
            "r={r} n={n}: {}",
            sum.mean
        );
    }
}

#[test]
fn negbin_exact_law_both_methods() {
    let mut s = stream(6);
    // n r <= 64 counts trials, larger products sum geometric variates
    for &(r, n) in &[(1u32, 5usize), (4, 10), (1, 100), (3, 50)] {
        let draws: Vec<u64> = (0..100_000)
            .map(|_| s.negbin_trials(r, n).unwrap())
            .collect();
        assert!(draws.iter().all(|&k| k >= r as u64));
        let p = negbin_gof(r, n, &draws);
        assert!(p > 1e-3, "r={r} n={n}: p = {p}");
    }
    let min = (0..10_000)
        .map(|_| s.negbin_trials(4, 2).unwrap())
        .min()
        .unwrap();
    assert_eq!(min, 4);
}

#[test]
fn gamma_moments() {
    let mut s = stream(7);
    let x: Vec<f64> = (0..MILLION).map(|_| s.gamma(2, 100).unwrap()).collect();
    let sum = Summary::of(&x).unwrap();
    assert!(
        (sum.mean - 200.0).abs() < 3.0 * sum.std_error,
        "{}",
        sum.mean
    );
    let y: Vec<f64> = (0..MILLION).map(|_| s.gamma(3, 10).unwrap()).collect();
    let (var, se) = variance_with_se(&y);
    assert!((var - 300.0).abs() < 3.0 * se, "{var} +- {se}");
}

#[test]
fn gamma_shape_one_is_exponential() {
    let mut s = stream(8);
    let n = 37usize;
    let x: Vec<f64> = (0..100_000).map(|_| s.gamma(1, n).unwrap()).collect();
    let g = ks_test_by(&x, "exp", |v| -(-v / n as f64).exp_m1()).unwrap();
    assert!(g.statistic < 1.36 / (1e5f64).sqrt(), "{g:?}");
    let y: Vec<f64> = (0..100_000).map(|_| s.gamma(3, n).unwrap()).collect();
    let g = ks_test_by(&y, "gamma3", |v| {
        let t = v / n as f64;
        1.0 - (-t).exp() * (1.0 + t + t * t / 2.0)
    })
    .unwrap();
    assert!(g.p_value > 1e-3, "{g:?}");
}

#[test]
fn streams_reproduce_and_decorrelate() {
    let draw = |idx: u64| -> Vec<f64> {
        let mut s = SeedSpec::new(99, idx).stream();
        (0..100_000).map(|_| s.exponential()).collect()
    };
    let a = draw(0);
    assert_eq!(a, draw(0));
    let b = draw(1);
    let rho = correlation(&a, &b).unwrap();
    assert!(rho.abs() < 3.0 / (1e5f64).sqrt(), "rho = {rho}");
    assert!(ks_critical_value(0.05, 100_000) < 0.005);
}
