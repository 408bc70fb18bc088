use coupon_limits::discrete::run_from_marks;
use coupon_limits::limit_laws::er_expectation;
use coupon_limits::samplers::LANE_MARKS;
use coupon_limits::special::EULER_GAMMA;
use coupon_limits::stats::Summary;
use coupon_limits::{run_discrete, Normalization, SeedSpec};

fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// Replays the mark lane of `seed` until every type has `r_max` arrivals.
fn replay_marks(n: usize, r_max: u32, seed: SeedSpec) -> Vec<usize> {
    let mut s = seed.lane(LANE_MARKS);
    let mut counts = vec![0u32; n];
    let mut done = 0;
    let mut seq = Vec::new();
    while done < n {
        let i = s.uniform_type(n).unwrap() - 1;
        seq.push(i);
        counts[i] += 1;
        if counts[i] == r_max {
            done += 1;
        }
    }
    seq
}

/// First time at which at least `n - m` types have `r` arrivals, by scanning
/// the coupon sequence; 0 when `m >= n`.
fn time_scan(n: usize, r: u32, m: usize, seq: &[usize]) -> u64 {
    if m >= n {
        return 0;
    }
    let mut counts = vec![0u32; n];
    let mut reached = 0;
    for (t, &i) in seq.iter().enumerate() {
        counts[i] += 1;
        if counts[i] == r {
            reached += 1;
        }
        if reached >= n - m {
            return t as u64 + 1;
        }
    }
    panic!("sequence too short");
}

#[test]
fn partial_times_match_time_scan() {
    let (n, r) = (4usize, 2u32);
    for j in 0..10_000 {
        let seed = SeedSpec::new(17, j);
        let trace = run_discrete(n, r, seed).unwrap();
        let seq = replay_marks(n, r, seed);
        assert_eq!(trace.total_draws(), seq.len() as u64);
        for m in 0..=n + 1 {
            assert_eq!(
                trace.partial_collection_time(r, m).unwrap(),
                time_scan(n, r, m, &seq),
                "replication {j}, m = {m}"
            );
        }
    }
}

#[test]
fn replayed_marks_rebuild_the_trace() {
    for j in 0..50 {
        let seed = SeedSpec::new(3, j);
        let trace = run_discrete(30, 3, seed).unwrap();
        let rebuilt = run_from_marks(30, 3, replay_marks(30, 3, seed))
            .unwrap()
            .unwrap();
        assert_eq!(trace, rebuilt);
    }
}

#[test]
fn mean_completion_time_at_three_types() {
    let t: Vec<f64> = (0..100_000)
        .map(|j| {
            run_discrete(3, 1, SeedSpec::new(5, j))
                .unwrap()
                .collection_time(1)
                .unwrap() as f64
        })
        .collect();
    let s = Summary::of(&t).unwrap();
    assert!(
        (s.mean - 5.5).abs() < 3.0 * s.std_error,
        "{} +- {}",
        s.mean,
        s.std_error
    );
}

#[test]
fn mean_completion_time_matches_harmonic_sum() {
    for &(n, reps) in &[(10usize, 10_000u64), (100, 10_000)] {
        let t: Vec<f64> = (0..reps)
            .map(|j| {
                run_discrete(n, 1, SeedSpec::new(6, j))
                    .unwrap()
                    .collection_time(1)
                    .unwrap() as f64
            })
            .collect();
        let s = Summary::of(&t).unwrap();
        let exact = n as f64 * harmonic(n);
        assert!(
            (s.mean - exact).abs() < 3.0 * s.std_error,
            "n={n}: {} vs {exact}",
            s.mean
        );
    }
}

#[test]
fn centered_completion_time_mean_is_euler_gamma() {
    let n = 10_000usize;
    let norm = Normalization::new(n, 1).unwrap();
    let x: Vec<f64> = (0..2000)
        .map(|j| {
            let t = run_discrete(n, 1, SeedSpec::new(7, j))
                .unwrap()
                .collection_time(1)
                .unwrap();
            norm.apply(t as f64)
        })
        .collect();
    let s = Summary::of(&x).unwrap();
    assert!((s.mean - EULER_GAMMA).abs() < 0.05, "{}", s.mean);
}

#[test]
fn expansion_is_close_to_exact_mean() {
    let exact = 1000.0 * harmonic(1000);
    let approx = er_expectation(1000, 1).unwrap();
    assert!((approx - exact).abs() < 1.0);
    assert!((approx - 7485.0).abs() < 0.5);
    let middle = er_expectation(10_000, 2).unwrap() - er_expectation(10_000, 1).unwrap();
    // adds n ln ln n and subtracts ln 1! = 0
    assert!((middle - 2.2203e4).abs() < 1.0, "{middle}");
}

#[test]
fn support_bounds() {
    for j in 0..2000 {
        let trace = run_discrete(2, 1, SeedSpec::new(8, j)).unwrap();
        assert!(trace.collection_time(1).unwrap() >= 2);
    }
    for j in 0..200 {
        let trace = run_discrete(12, 4, SeedSpec::new(9, j)).unwrap();
        for c in 1..=4 {
            let t = trace.collection_time(c).unwrap();
            assert!(t >= 12 && t >= c as u64);
            assert_eq!(t, trace.column(c).unwrap().into_iter().max().unwrap());
        }
        assert_eq!(trace.total_draws(), trace.collection_time(4).unwrap());
        let seq: Vec<u64> = (0..=13)
            .map(|m| trace.partial_collection_time(2, m).unwrap())
            .collect();
        assert!(seq.windows(2).all(|w| w[1] <= w[0]));
    }
}
