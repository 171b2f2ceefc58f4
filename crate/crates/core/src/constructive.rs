//! Closed-form thresholds, the median-critical region, and constructors that
//! build stable arrangements directly.
//!
//! The two-type constructors take counts `(n_a, n_b)` for biases `+1` and
//! `-1` and return arrangements over [`reference_instance`]; every output is
//! re-checked with [`is_stable`] before it is handed back.

use crate::error::{BlottoError, Result};
use crate::model::{AgentClass, Arrangement, Instance, Outcome};
use crate::number::Number;
use crate::stability::is_stable;

/// Unlabeled cost above which no stable arrangement leaves an item empty:
/// half the largest bias gap, scaled by `max w / min w`.
pub fn empty_threshold(instance: &Instance) -> Number {
    if instance.num_classes() < 2 {
        return Number::integer(0);
    }
    let weights = instance.weights();
    let max_w = weights.iter().cloned().reduce(Number::max).expect("at least one item");
    let min_w = weights.iter().cloned().reduce(Number::min).expect("at least one item");
    Number::ratio(1, 2) * instance.max_bias_gap() * max_w / min_w
}

/// The unlabeled cost that `auto` resolves to: 1.1 times [`empty_threshold`].
pub fn auto_unlabeled_cost(instance: &Instance) -> Number {
    Number::ratio(11, 10) * empty_threshold(instance)
}

/// Two unit-weight classes with biases `+1` (count `n_a`) and `-1` (count
/// `n_b`) and the automatic unlabeled cost `11/10`.
pub fn reference_instance(outcome: Outcome, n_a: u32, n_b: u32, m: usize) -> Result<Instance> {
    Instance::two_class(outcome, m, (n_a, Number::integer(1)), (n_b, Number::integer(-1)), Number::ratio(11, 10))
}

/// Builds an arrangement from per-item `(a, b)` counts, where `a` counts the
/// highest-bias class and `b` the lowest-bias class of `instance`.
pub fn arrangement_from_roles(instance: &Instance, rows: &[(u32, u32)]) -> Result<Arrangement> {
    let k = instance.num_classes();
    if k > 2 {
        return Err(BlottoError::InvalidInstance("role arrangements need at most two classes".into()));
    }
    let classes = instance.classes();
    let a_col = if k == 2 && classes[1].bias > classes[0].bias { 1 } else { 0 };
    let b_col = if k == 2 { 1 - a_col } else { 0 };
    let mut counts = vec![0; rows.len() * k];
    for (i, &(a, b)) in rows.iter().enumerate() {
        counts[i * k + a_col] += a;
        counts[i * k + b_col] += b;
    }
    let arrangement = Arrangement::new(rows.len(), k, counts)?;
    arrangement.validate_for(instance)?;
    Ok(arrangement)
}

fn certify(instance: &Instance, arrangement: Arrangement) -> Result<Arrangement> {
    let report = is_stable(instance, &arrangement)?;
    match report.witness {
        None => Ok(arrangement),
        Some(w) => Err(BlottoError::ConstructionUnstable(format!(
            "class {} improves by moving from item {} to item {}",
            w.class_index, w.from_item, w.to_item
        ))),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RegionVariant {
    /// Third condition `n_b < n_a - m`.
    StrictAsWritten,
    /// Third condition `n_b <= n_a - m`. Matches exhaustive search except on
    /// the line `N = 2m` with both counts even (see [`stable_exists_median`]).
    #[default]
    Inclusive,
}

/// Counts for which the median game with at least `m` agents has no stable
/// arrangement. Symmetric in the two counts.
pub fn in_median_critical_region(n_a: u32, n_b: u32, m: usize, variant: RegionVariant) -> bool {
    let one_way = |big: u32, small: u32| {
        let (big, small, m) = (i64::from(big), i64::from(small), m as i64);
        let third = match variant {
            RegionVariant::StrictAsWritten => small < big - m,
            RegionVariant::Inclusive => small <= big - m,
        };
        big + small <= 2 * m && m < big && 1 <= small && third
    };
    one_way(n_a, n_b) || one_way(n_b, n_a)
}

/// Whether a stable median arrangement exists, for `n_a + n_b >= m` and an
/// unlabeled cost above the threshold.
///
/// This is the complement of the inclusive region, except that `N = 2m` with
/// both counts even always admits the homogeneous arrangement of
/// [`construct_many_agents`]; the region touches that line when `4 | m`,
/// e.g. `(6, 2)` on four items.
pub fn stable_exists_median(n_a: u32, n_b: u32, m: usize) -> Result<bool> {
    let total = (n_a + n_b) as usize;
    if total < m {
        return Err(BlottoError::PreconditionViolated(format!("{total} agents is fewer than {m} items")));
    }
    let even_split = total == 2 * m && n_a.is_multiple_of(2) && n_b.is_multiple_of(2);
    Ok(even_split || !in_median_critical_region(n_a, n_b, m, RegionVariant::Inclusive))
}

// Role rows are computed with the larger count as `a`; swap back afterwards.
fn oriented(n_a: u32, n_b: u32, build: impl Fn(u32, u32) -> Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    if n_a >= n_b {
        build(n_a, n_b)
    } else {
        build(n_b, n_a).into_iter().map(|(a, b)| (b, a)).collect()
    }
}

/// Greedy fill of `items` with `count` agents: two per item while at least
/// four remain, everything left on the current item otherwise, and the
/// remainder dumped on the last item.
fn fill_pairs(count: u32, items: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(items);
    let mut left = count;
    while left > 0 && out.len() < items {
        let take = if out.len() + 1 == items || left < 4 { left } else { 2 };
        out.push(take);
        left -= take;
    }
    out
}

/// Homogeneous arrangement for many agents (`N >= 2m + 1`, or `N = 2m` with
/// both counts even). Items hold a single type with at least two agents, so
/// no single move changes any median; a lone minority agent is placed on the
/// last majority item instead.
pub fn construct_many_agents(n_a: u32, n_b: u32, m: usize) -> Result<Arrangement> {
    let total = (n_a + n_b) as usize;
    if !(total > 2 * m || (total == 2 * m && n_a.is_multiple_of(2) && n_b.is_multiple_of(2))) {
        return Err(BlottoError::PreconditionViolated(format!(
            "({n_a},{n_b}) on {m} items needs N >= 2m+1, or N = 2m with both counts even"
        )));
    }
    let rows = oriented(n_a, n_b, |a, b| {
        let mut rows = vec![(0, 0); m];
        if b <= 1 {
            for (i, x) in fill_pairs(a, m).into_iter().enumerate() {
                rows[i].0 = x;
            }
            rows[m - 1].1 += b;
        } else if m == 1 {
            rows[0] = (a, b);
        } else {
            let b_rows = fill_pairs(b, m - 1);
            let used = b_rows.len();
            for (i, x) in b_rows.into_iter().enumerate() {
                rows[i].1 = x;
            }
            for (i, x) in fill_pairs(a, m - used).into_iter().enumerate() {
                rows[used + i].0 = x;
            }
        }
        rows
    });
    let instance = reference_instance(Outcome::Median, n_a, n_b, m)?;
    certify(&instance, arrangement_from_roles(&instance, &rows)?)
}

/// Arrangement built around exact ties, for `m <= N <= 2m` outside the
/// median-critical region. The first item holds `x` agents of each type
/// (and, when `N - m` is even, the second holds one of each); every other
/// item holds a single agent.
pub fn construct_tie_based(n_a: u32, n_b: u32, m: usize) -> Result<Arrangement> {
    let total = (n_a + n_b) as usize;
    if total < m || total > 2 * m || in_median_critical_region(n_a, n_b, m, RegionVariant::Inclusive) {
        return Err(BlottoError::PreconditionViolated(format!(
            "({n_a},{n_b}) on {m} items needs m <= N <= 2m outside the median-critical region"
        )));
    }
    let rows = oriented(n_a, n_b, |a, b| {
        let mut rows = Vec::with_capacity(m);
        let (mut a_left, mut b_left) = (a, b);
        if b == 0 {
            rows.push((a - (m as u32 - 1), 0));
            a_left = m as u32 - 1;
        } else if total > m {
            let excess = (total - m) as u32;
            let x = if excess % 2 == 1 { excess.div_ceil(2) } else { excess / 2 };
            rows.push((x, x));
            a_left -= x;
            b_left -= x;
            if excess.is_multiple_of(2) {
                rows.push((1, 1));
                a_left -= 1;
                b_left -= 1;
            }
        }
        rows.extend((0..a_left).map(|_| (1, 0)));
        rows.extend((0..b_left).map(|_| (0, 1)));
        rows
    });
    debug_assert_eq!(rows.len(), m);
    let instance = reference_instance(Outcome::Median, n_a, n_b, m)?;
    certify(&instance, arrangement_from_roles(&instance, &rows)?)
}

/// One agent per item for `N <= m`: agents in descending `|bias|` order go
/// onto items in descending weight order. The flag reports whether the
/// sufficient condition `0.5 * gap * w_(1) <= w_(N) * c_u` holds, where
/// `w_(k)` is the k-th largest weight; when it does the arrangement is stable.
pub fn singleton_arrangement(instance: &Instance) -> Result<(Arrangement, bool)> {
    let m = instance.num_items();
    let n = instance.total_agents() as usize;
    if n > m {
        return Err(BlottoError::PreconditionViolated(format!("{n} agents exceed {m} items")));
    }
    let mut agents: Vec<usize> = instance
        .classes()
        .iter()
        .enumerate()
        .flat_map(|(t, c)| std::iter::repeat_n(t, c.count as usize))
        .collect();
    let classes = instance.classes();
    agents.sort_by(|&x, &y| classes[y].bias.abs().partial_cmp(&classes[x].bias.abs()).unwrap().then(x.cmp(&y)));
    let mut items: Vec<usize> = (0..m).collect();
    let weights = instance.weights();
    items.sort_by(|&i, &j| weights[j].partial_cmp(&weights[i]).unwrap().then(i.cmp(&j)));

    let k = instance.num_classes();
    let mut counts = vec![0; m * k];
    for (&t, &i) in agents.iter().zip(&items) {
        counts[i * k + t] += 1;
    }
    let arrangement = Arrangement::new(m, k, counts)?;
    let sufficient = n <= 1 || {
        let heaviest = &weights[items[0]];
        let lightest_used = &weights[items[n - 1]];
        Number::ratio(1, 2) * instance.max_bias_gap() * heaviest.clone() <= lightest_used * instance.unlabeled_cost()
    };
    if sufficient {
        return Ok((certify(instance, arrangement)?, true));
    }
    Ok((arrangement, false))
}

/// Two-item weights under which the mean game with counts `(n_a, n_b)` has a
/// stable arrangement.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizingWeights {
    pub w1: Number,
    pub w2: Number,
    pub arrangement: Arrangement,
    /// Mean-outcome instance with these weights and `c_u` at 1.1 times its threshold.
    pub instance: Instance,
}

/// Weights `w1 + w2 = 1` with `w2 / w1` at half of `2(n_a-1)/((N-2)(N-1))`,
/// making `((n_a-1, n_b), (1, 0))` stable. With `N = 2` or a single type the
/// weights are equal.
pub fn stabilizing_weights(n_a: u32, n_b: u32) -> Result<StabilizingWeights> {
    let total = n_a + n_b;
    if n_a < 1 || n_a < n_b || total < 2 {
        return Err(BlottoError::PreconditionViolated(format!(
            "stabilizing weights need n_a >= max(1, n_b) and N >= 2, got ({n_a},{n_b})"
        )));
    }
    let (w1, w2, rows) = if n_b == 0 || total == 2 {
        let half = Number::ratio(1, 2);
        let rows = if total == 2 { vec![(1, 0), (n_a - 1, n_b)] } else { vec![(n_a - 1, 0), (1, 0)] };
        (half.clone(), half, rows)
    } else {
        let (na, n) = (i64::from(n_a), i64::from(total));
        let ratio = Number::ratio(na - 1, (n - 2) * (n - 1));
        let one = Number::integer(1);
        let w1 = &one / &(&one + &ratio);
        let w2 = &ratio / &(&one + &ratio);
        (w1, w2, vec![(n_a - 1, n_b), (1, 0)])
    };
    let classes = vec![AgentClass::new(Number::integer(1), n_a), AgentClass::new(Number::integer(-1), n_b)];
    let draft = Instance::new(2, Some(vec![w1.clone(), w2.clone()]), classes, Number::integer(0), Outcome::Mean)?;
    let instance = draft.with_unlabeled_cost(auto_unlabeled_cost(&draft))?;
    let arrangement = certify(&instance, arrangement_from_roles(&instance, &rows)?)?;
    Ok(StabilizingWeights { w1, w2, arrangement, instance })
}
