//! Exhaustive enumeration of arrangements.
//!
//! The arrangement space of an instance is the Cartesian product, over
//! classes, of the weak compositions of the class count into `m` parts.
//! Compositions are produced in descending lexicographic order, so for two
//! items and two agents the order is `(2,0)`, `(1,1)`, `(0,2)`.

use crate::error::{BlottoError, Result};
use crate::model::{Arrangement, Instance};

pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000_000;

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul(u128::from(n - i)) {
            Some(v) => v / u128::from(i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of weak compositions of `n` into `parts` parts.
pub fn composition_count(n: u32, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(n == 0);
    }
    binomial(u64::from(n) + parts as u64 - 1, parts as u64 - 1)
}

/// Size of the full arrangement space, saturating.
pub fn arrangement_count(instance: &Instance) -> u128 {
    instance
        .classes()
        .iter()
        .map(|c| composition_count(c.count, instance.num_items()))
        .fold(1u128, |acc, x| acc.saturating_mul(x))
}

pub(crate) fn check_budget(instance: &Instance, budget: u64) -> Result<u128> {
    let size = arrangement_count(instance);
    if size > u128::from(budget) {
        return Err(BlottoError::SearchTooLarge { size, budget });
    }
    Ok(size)
}

/// Weak compositions of `total` into `parts` parts, descending lexicographic.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Compositions {
    pub fn new(total: u32, parts: usize) -> Self {
        assert!(parts > 0, "compositions need at least one part");
        let mut first = vec![0; parts];
        first[0] = total;
        Compositions { current: Some(first) }
    }

    fn advance(c: &mut [u32]) -> bool {
        let last = c.len() - 1;
        let Some(p) = (0..last).rev().find(|&p| c[p] > 0) else {
            return false;
        };
        let tail = c[last];
        c[p] -= 1;
        c[last] = 0;
        c[p + 1] = tail + 1;
        true
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        if !Compositions::advance(cur) {
            self.current = None;
        }
        Some(out)
    }
}

/// Every arrangement of an instance; class 0 varies slowest.
#[derive(Clone, Debug)]
pub struct Arrangements {
    items: usize,
    frozen: usize,
    state: Option<Vec<Vec<u32>>>,
}

impl Arrangements {
    pub fn new(instance: &Instance) -> Self {
        Arrangements::with_prefix(instance.num_items(), &instance.counts(), None)
    }

    /// Arrangements whose class-0 column is fixed to `first`.
    pub(crate) fn with_prefix(items: usize, totals: &[u32], first: Option<Vec<u32>>) -> Self {
        let mut state: Vec<Vec<u32>> = totals
            .iter()
            .map(|&n| {
                let mut c = vec![0; items];
                c[0] = n;
                c
            })
            .collect();
        let frozen = usize::from(first.is_some());
        if let Some(f) = first {
            state[0] = f;
        }
        Arrangements { items, frozen, state: Some(state) }
    }

    fn build(&self, columns: &[Vec<u32>]) -> Arrangement {
        let k = columns.len();
        let mut counts = vec![0; self.items * k];
        for (t, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                counts[i * k + t] = v;
            }
        }
        Arrangement::from_raw(self.items, k, counts)
    }
}

impl Iterator for Arrangements {
    type Item = Arrangement;

    fn next(&mut self) -> Option<Arrangement> {
        let columns = self.state.as_ref()?;
        let out = self.build(columns);
        let frozen = self.frozen;
        let columns = self.state.as_mut().unwrap();
        let mut t = columns.len();
        loop {
            if t <= frozen {
                self.state = None;
                break;
            }
            t -= 1;
            if Compositions::advance(&mut columns[t]) {
                break;
            }
            let n: u32 = columns[t].iter().sum();
            columns[t].iter_mut().for_each(|x| *x = 0);
            columns[t][0] = n;
        }
        Some(out)
    }
}

pub fn enumerate_arrangements(instance: &Instance) -> Arrangements {
    Arrangements::new(instance)
}

/// Like [`enumerate_arrangements`] but refuses spaces larger than `budget`.
pub fn enumerate_arrangements_within(instance: &Instance, budget: u64) -> Result<Arrangements> {
    check_budget(instance, budget)?;
    Ok(Arrangements::new(instance))
}

/// Arrangements with rows in non-increasing lexicographic order, one per
/// item-permutation class, together with the size of that class.
pub(crate) fn canonical_arrangements(instance: &Instance) -> Vec<(Arrangement, u128)> {
    let m = instance.num_items();
    let k = instance.num_classes();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(m);
    let remaining = instance.counts();
    canonical_rec(m, k, &mut rows, remaining, &mut out);
    out
}

fn canonical_rec(m: usize, k: usize, rows: &mut Vec<Vec<u32>>, remaining: Vec<u32>, out: &mut Vec<(Arrangement, u128)>) {
    let left = m - rows.len();
    if left == 1 {
        if rows.last().is_none_or(|prev| remaining <= *prev) {
            rows.push(remaining);
            let arrangement = Arrangement::from_raw(m, k, rows.concat());
            out.push((arrangement, permutation_count(rows)));
            rows.pop();
        }
        return;
    }
    // Candidate rows in descending lexicographic order, capped by the previous row.
    let mut row = match rows.last() {
        Some(prev) => largest_below(&remaining, prev),
        None => remaining.clone(),
    };
    loop {
        // Later rows are lexicographically smaller, so none holds more class-0
        // agents than this one.
        // agents than this one; candidates only get smaller, so stop there.
        let rest0 = u64::from(remaining[0] - row[0]);
        if rest0 > u64::from(row[0]) * (left as u64 - 1) {
            break;
        }
        let next_remaining: Vec<u32> = remaining.iter().zip(&row).map(|(r, x)| r - x).collect();
        rows.push(row.clone());
        canonical_rec(m, k, rows, next_remaining, out);
        rows.pop();
        if !prev_bounded(&mut row, &remaining) {
            break;
        }
    }
}

/// Lexicographically largest vector in the box `0..=bound` that is `<= cap`.
fn largest_below(bound: &[u32], cap: &[u32]) -> Vec<u32> {
    let mut row = Vec::with_capacity(bound.len());
    for t in 0..bound.len() {
        if bound[t] < cap[t] {
            row.push(bound[t]);
            row.extend_from_slice(&bound[t + 1..]);
            return row;
        }
        row.push(cap[t]);
    }
    row
}

/// Steps `row` to the next smaller vector in the box `0..=bound` (lexicographic).
fn prev_bounded(row: &mut [u32], bound: &[u32]) -> bool {
    for t in (0..row.len()).rev() {
        if row[t] > 0 {
            row[t] -= 1;
            for (x, b) in row[t + 1..].iter_mut().zip(&bound[t + 1..]) {
                *x = *b;
            }
            return true;
        }
    }
    false
}

fn permutation_count(rows: &[Vec<u32>]) -> u128 {
    let factorial = |n: usize| (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b));
    let mut total = factorial(rows.len());
    let mut run = 1;
    for i in 1..=rows.len() {
        if i < rows.len() && rows[i] == rows[i - 1] {
            run += 1;
        } else {
            total /= factorial(run);
            run = 1;
        }
    }
    total
}
