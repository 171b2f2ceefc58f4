//! Misallocated effort, proportionality, the fractional relaxation, and
//! generators for the instances that have no stable arrangement.

use crate::constructive::{arrangement_from_roles, auto_unlabeled_cost, reference_instance};
use crate::error::{BlottoError, Result};
use crate::model::{AgentClass, Arrangement, FractionalAllocation, Instance, Outcome};
use crate::number::Number;
use crate::stability::is_stable;

/// Deviation of an arrangement from the weight-proportional allocation.
#[derive(Clone, Debug, PartialEq)]
pub struct EffortReport {
    /// Sum of every entry of `per_item_deviation`.
    pub misallocated_effort: Number,
    /// `per_item_deviation[i][t] = |w_i * n_t - count(i, t)|` with normalized weights.
    pub per_item_deviation: Vec<Vec<Number>>,
}

/// Proportional target `w_i * n_t` with weights normalized to sum to one.
fn targets(instance: &Instance) -> Vec<Vec<Number>> {
    instance
        .normalized_weights()
        .iter()
        .map(|w| instance.classes().iter().map(|c| w * &Number::integer(i64::from(c.count))).collect())
        .collect()
}

pub fn misallocated_effort(instance: &Instance, arrangement: &Arrangement) -> Result<EffortReport> {
    arrangement.validate_for(instance)?;
    let per_item_deviation: Vec<Vec<Number>> = targets(instance)
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(t, target)| (target - Number::integer(i64::from(arrangement.get(i, t)))).abs())
                .collect()
        })
        .collect();
    let misallocated_effort = per_item_deviation.iter().flatten().fold(Number::integer(0), |acc, d| &acc + d);
    Ok(EffortReport { misallocated_effort, per_item_deviation })
}

/// True when every per-item class count is within 1 of its proportional target.
pub fn check_close_to_proportional(instance: &Instance, arrangement: &Arrangement) -> Result<bool> {
    let one = Number::integer(1);
    Ok(misallocated_effort(instance, arrangement)?.per_item_deviation.iter().flatten().all(|d| *d <= one))
}

/// The proportional allocation `w_i * n_t`, the equilibrium of the divisible game.
pub fn fractional_equilibrium(instance: &Instance) -> Result<FractionalAllocation> {
    if instance.outcome() != Outcome::Mean {
        return Err(BlottoError::OutcomeMismatch);
    }
    let rows: Vec<Vec<f64>> = targets(instance).iter().map(|r| r.iter().map(Number::to_f64).collect()).collect();
    FractionalAllocation::new(instance, &rows)
}

/// First-order-condition diagnostics for a fractional allocation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FocReport {
    /// Largest spread (max minus min over items) of a class's marginal cost.
    pub analytic_spread: f64,
    /// Largest gap between the analytic derivative and a central difference.
    pub fd_disagreement: f64,
}

impl FocReport {
    pub fn residual(&self) -> f64 {
        self.analytic_spread.max(self.fd_disagreement)
    }
}

pub const FD_STEP: f64 = 1e-6;

/// Marginal cost to class `t` of more mass on each item, in units of the
/// bias gap: `d/dx [w_i * opp_i / (x + opp_i)] = -w_i * opp_i / tot_i^2`,
/// checked against a central finite difference.
pub fn fractional_foc_report(instance: &Instance, allocation: &FractionalAllocation) -> Result<FocReport> {
    if instance.outcome() != Outcome::Mean {
        return Err(BlottoError::OutcomeMismatch);
    }
    let k = instance.num_classes();
    if k > 2 || allocation.num_classes() != k || allocation.num_items() != instance.num_items() {
        return Err(BlottoError::PreconditionViolated("first-order conditions need at most two classes".into()));
    }
    let weights: Vec<f64> = instance.normalized_weights().iter().map(Number::to_f64).collect();
    let m = instance.num_items();
    for i in 0..m {
        if allocation.row(i).iter().sum::<f64>() <= 0.0 {
            return Err(BlottoError::DegenerateItem(i));
        }
    }
    let mut report = FocReport { analytic_spread: 0.0, fd_disagreement: 0.0 };
    for t in 0..k {
        let mut derivs = Vec::with_capacity(m);
        for (i, w) in weights.iter().enumerate() {
            let own = allocation.get(i, t);
            let opp = allocation.row(i).iter().sum::<f64>() - own;
            let term = |x: f64| w * opp / (x + opp);
            let analytic = -w * opp / (own + opp).powi(2);
            let numeric = (term(own + FD_STEP) - term(own - FD_STEP)) / (2.0 * FD_STEP);
            report.fd_disagreement = report.fd_disagreement.max((analytic - numeric).abs());
            derivs.push(analytic);
        }
        let hi = derivs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = derivs.iter().cloned().fold(f64::INFINITY, f64::min);
        report.analytic_spread = report.analytic_spread.max(hi - lo);
    }
    Ok(report)
}

/// `max(analytic spread, finite-difference disagreement)`; zero at the equilibrium.
pub fn fractional_foc_residual(instance: &Instance, allocation: &FractionalAllocation) -> Result<f64> {
    Ok(fractional_foc_report(instance, allocation)?.residual())
}

/// Stable median arrangement with large misallocation: two `-1` agents per
/// item on items `1..m-1` (surplus on item `m-1`) and every `+1` agent on the
/// last item. Needs `N >= 2m` and `n_b >= 2(m-1)`.
pub fn construct_high_misallocation(n_a: u32, n_b: u32, m: usize) -> Result<Arrangement> {
    let total = (n_a + n_b) as usize;
    if total < 2 * m || (n_b as usize) < 2 * (m - 1) || n_a == 0 {
        return Err(BlottoError::PreconditionViolated(format!(
            "({n_a},{n_b}) on {m} items needs N >= 2m, n_b >= 2(m-1) and n_a >= 1"
        )));
    }
    let mut rows = vec![(0, 2); m - 1];
    if let Some(last_b) = rows.last_mut() {
        last_b.1 = n_b - 2 * (m as u32 - 2);
        rows.push((n_a, 0));
    } else {
        rows.push((n_a, n_b));
    }
    let instance = reference_instance(Outcome::Median, n_a, n_b, m)?;
    let arrangement = arrangement_from_roles(&instance, &rows)?;
    match is_stable(&instance, &arrangement)?.witness {
        None => Ok(arrangement),
        Some(w) => Err(BlottoError::ConstructionUnstable(format!(
            "class {} improves by moving from item {} to item {}",
            w.class_index, w.from_item, w.to_item
        ))),
    }
}

fn few_agents_instance(n: u32, m: usize, cu: Number, outcome: Outcome) -> Result<Instance> {
    let classes = vec![AgentClass::new(Number::integer(1), 1), AgentClass::new(Number::ratio(-1, 2), n - 1)];
    Instance::new(m, None, classes, cu, outcome)
}

/// Median game with one agent at `1`, `N-1` at `-1/2` and `c_u = 3/10`;
/// it has no stable arrangement for `2 < N < m`.
pub fn scenario_no_ne_median(n: u32, m: usize) -> Result<Instance> {
    if !(2 < n && (n as usize) < m) {
        return Err(BlottoError::PreconditionViolated(format!("need 2 < N < m, got N={n}, m={m}")));
    }
    few_agents_instance(n, m, Number::ratio(3, 10), Outcome::Median)
}

/// Default unlabeled cost of [`scenario_no_ne_mean`].
pub fn default_no_ne_mean_cost() -> Number {
    Number::ratio(1, 5)
}

/// Mean game with one agent at `1`, `N-1` at `-1/2` and `c_u` strictly
/// between `1/8` and `1/4` (default `1/5`); no stable arrangement for `4 <= N < m`.
pub fn scenario_no_ne_mean(n: u32, m: usize, unlabeled_cost: Option<Number>) -> Result<Instance> {
    if !(4 <= n && (n as usize) < m) {
        return Err(BlottoError::PreconditionViolated(format!("need 4 <= N < m, got N={n}, m={m}")));
    }
    let cu = unlabeled_cost.unwrap_or_else(default_no_ne_mean_cost);
    if !(cu > Number::ratio(1, 8) && cu < Number::ratio(1, 4)) {
        return Err(BlottoError::PreconditionViolated(format!("c_u = {cu} is outside (1/8, 1/4)")));
    }
    few_agents_instance(n, m, cu, Outcome::Mean)
}

/// Weighted median game without a stable arrangement: four items weighted
/// `(11/10, 1, 1, 1)`, three agents at each of `+1` and `-1`, automatic `c_u`.
pub fn scenario_weighted_median_no_ne() -> Result<Instance> {
    let weights = vec![Number::ratio(11, 10), Number::integer(1), Number::integer(1), Number::integer(1)];
    let draft = reference_instance(Outcome::Median, 3, 3, 4)?.with_weights(weights)?;
    draft.with_unlabeled_cost(auto_unlabeled_cost(&draft))
}

/// Which arrangement is stable for two agents of one type and one of another
/// under the mean outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThreeAgentRegime {
    /// `{a, a, b}` on one item.
    AllTogether,
    /// `{a, b}` and `{a}`.
    PairPlusOne,
    /// `{a}`, `{a}`, `{b}`.
    AllSeparate,
}

/// Regime for bias gap `gap` and unlabeled cost `c_u`; boundaries `gap/6`
/// and `gap/2` belong to the lower regime.
pub fn three_agent_regime(gap: &Number, unlabeled_cost: &Number) -> Result<ThreeAgentRegime> {
    let zero = Number::integer(0);
    if *gap <= zero || *unlabeled_cost <= zero {
        return Err(BlottoError::PreconditionViolated("gap and c_u must be positive".into()));
    }
    Ok(if *unlabeled_cost <= gap / &Number::integer(6) {
        ThreeAgentRegime::AllTogether
    } else if *unlabeled_cost <= gap / &Number::integer(2) {
        ThreeAgentRegime::PairPlusOne
    } else {
        ThreeAgentRegime::AllSeparate
    })
}

/// Mean game with two agents at `gap`, one at `0`, on `m` unit-weight items.
pub fn three_agent_instance(gap: &Number, unlabeled_cost: &Number, m: usize) -> Result<Instance> {
    let classes = vec![AgentClass::new(gap.clone(), 2), AgentClass::new(Number::integer(0), 1)];
    Instance::new(m, None, classes, unlabeled_cost.clone(), Outcome::Mean)
}

impl ThreeAgentRegime {
    /// The arrangement this regime names, over [`three_agent_instance`].
    pub fn arrangement(self, instance: &Instance) -> Result<Arrangement> {
        let m = instance.num_items();
        let mut rows = match self {
            ThreeAgentRegime::AllTogether => vec![(2, 1)],
            ThreeAgentRegime::PairPlusOne => vec![(1, 1), (1, 0)],
            ThreeAgentRegime::AllSeparate => vec![(1, 0), (1, 0), (0, 1)],
        };
        if rows.len() > m {
            return Err(BlottoError::PreconditionViolated(format!("{self:?} needs at least {} items", rows.len())));
        }
        rows.resize(m, (0, 0));
        arrangement_from_roles(instance, &rows)
    }
}
