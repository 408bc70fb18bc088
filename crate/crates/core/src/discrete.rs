//! Discrete coupon scheme: one coupon per unit time, types equiprobable.

use crate::error::{invalid, Result};
use crate::samplers::{check_types, SeedSpec, LANE_MARKS};

/// Arrival-time matrix of one replication.
///
/// Entry `(i, r)` (zero-based type `i`, one-based multiplicity `r`) is the
/// time of the `r`-th arrival of type `i`. Times start at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectorTrace {
    n: usize,
    r_max: u32,
    arrivals: Vec<u64>,
    total_draws: u64,
}

pub(crate) fn check_multiplicity(r_max: u32) -> Result<()> {
    if r_max < 1 {
        return Err(invalid("r_max must be >= 1"));
    }
    Ok(())
}

/// Draws coupons from the mark lane of `seed` until every type has arrived
/// `r_max` times.
pub fn run_discrete(n: usize, r_max: u32, seed: SeedSpec) -> Result<CollectorTrace> {
    check_types(n)?;
    check_multiplicity(r_max)?;
    let mut marks = seed.lane(LANE_MARKS);
    Ok(collect(n, r_max, || marks.type_index(n)))
}

/// Runs the scheme on an explicit sequence of zero-based types. Returns
/// `None` if the sequence ends before the collection is complete.
pub fn run_from_marks<I>(n: usize, r_max: u32, marks: I) -> Result<Option<CollectorTrace>>
where
    I: IntoIterator<Item = usize>,
{
    check_types(n)?;
    check_multiplicity(r_max)?;
    let mut iter = marks.into_iter();
    let mut exhausted = false;
    let mut bad_mark = None;
    let trace = collect(n, r_max, || match iter.next() {
        Some(i) if i < n => i,
        Some(i) => {
            bad_mark = Some(i);
            usize::MAX
        }
        None => {
            exhausted = true;
            usize::MAX
        }
    });
    if let Some(i) = bad_mark {
        return Err(invalid(format!("mark {i} out of range for n = {n}")));
    }
    Ok((!exhausted).then_some(trace))
}

/// Core loop shared by the seeded and explicit-sequence drivers. A mark of
/// `usize::MAX` aborts the run.
pub(crate) fn collect(n: usize, r_max: u32, mut next: impl FnMut() -> usize) -> CollectorTrace {
    let width = r_max as usize;
    let mut counts = vec![0u32; n];
    let mut arrivals = vec![0u64; n * width];
    let mut complete = 0usize;
    let mut t = 0u64;
    while complete < n {
        let i = next();
        if i == usize::MAX {
            break;
        }
        t += 1;
        let c = counts[i];
        if c < r_max {
            arrivals[i * width + c as usize] = t;
            counts[i] = c + 1;
            if c + 1 == r_max {
                complete += 1;
            }
        }
    }
    CollectorTrace {
        n,
        r_max,
        arrivals,
        total_draws: t,
    }
}

impl CollectorTrace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    /// Number of coupons drawn, equal to the largest arrival time.
    pub fn total_draws(&self) -> u64 {
        self.total_draws
    }

    /// Time of the `r`-th arrival of zero-based type `i`.
    pub fn arrival(&self, i: usize, r: u32) -> u64 {
        assert!(
            i < self.n && r >= 1 && r <= self.r_max,
            "index out of range"
        );
        self.arrivals[i * self.r_max as usize + (r - 1) as usize]
    }

    /// Times of the `r`-th arrivals of all types, in type order.
    pub fn column(&self, r: u32) -> Result<Vec<u64>> {
        self.check_r(r)?;
        let w = self.r_max as usize;
        let k = (r - 1) as usize;
        Ok((0..self.n).map(|i| self.arrivals[i * w + k]).collect())
    }

    /// Row-major arrival matrix, entry `i * r_max + (r - 1)`.
    pub fn entries(&self) -> &[u64] {
        &self.arrivals
    }

    fn check_r(&self, r: u32) -> Result<()> {
        if r < 1 || r > self.r_max {
            return Err(invalid(format!(
                "multiplicity {r} outside 1..={}",
                self.r_max
            )));
        }
        Ok(())
    }

    /// Time at which `c` complete collections are first assembled.
    pub fn collection_time(&self, c: u32) -> Result<u64> {
        self.check_r(c)?;
        Ok(self.column(c)?.into_iter().max().unwrap_or(0))
    }

    /// First time at which some `n - m` types have each arrived at least
    /// `r` times; zero when `m >= n`.
    pub fn partial_collection_time(&self, r: u32, m: usize) -> Result<u64> {
        self.check_r(r)?;
        if m >= self.n {
            return Ok(0);
        }
        let mut col = self.column(r)?;
        let k = self.n - m - 1;
        let (_, kth, _) = col.select_nth_unstable(k);
        Ok(*kth)
    }

    /// `partial_collection_time(r, j)` for `j = 0..=m`.
    pub fn partial_collection_times(&self, r: u32, m: usize) -> Result<Vec<u64>> {
        self.check_r(r)?;
        let mut col = self.column(r)?;
        let top = (m + 1).min(self.n);
        let split = self.n - top;
        if split > 0 {
            col.select_nth_unstable(split);
        }
        let upper = &mut col[split..];
        upper.sort_unstable_by(|a, b| b.cmp(a));
        Ok((0..=m)
            .map(|j| upper.get(j).copied().unwrap_or(0))
            .collect())
    }
}
