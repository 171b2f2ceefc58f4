//! Game description: agent classes, items, arrangements and costs.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{BlottoError, Result};
use crate::eval::Engine;
use crate::number::Number;

/// How the biases present on an item are aggregated into its outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Median,
    Mean,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Median => "median",
            Outcome::Mean => "mean",
        })
    }
}

impl std::str::FromStr for Outcome {
    type Err = BlottoError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "median" => Ok(Outcome::Median),
            "mean" => Ok(Outcome::Mean),
            other => Err(BlottoError::Parse(format!("unknown outcome function {other:?}"))),
        }
    }
}

/// A group of interchangeable agents sharing one bias.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentClass {
    pub bias: Number,
    pub count: u32,
}

impl AgentClass {
    pub fn new(bias: impl Into<Number>, count: u32) -> Self {
        AgentClass { bias: bias.into(), count }
    }
}

/// A Private Blotto game.
///
/// Construction normalizes the class list: zero-count classes are dropped and
/// the rest are sorted by descending count, then ascending bias, so the first
/// class is always the most numerous one.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    num_items: usize,
    weights: Vec<Number>,
    classes: Vec<AgentClass>,
    unlabeled_cost: Number,
    outcome: Outcome,
}

impl Instance {
    pub fn new(
        num_items: usize,
        weights: Option<Vec<Number>>,
        classes: Vec<AgentClass>,
        unlabeled_cost: Number,
        outcome: Outcome,
    ) -> Result<Self> {
        if num_items == 0 {
            return Err(BlottoError::InvalidInstance("num_items must be at least 1".into()));
        }
        let weights = weights.unwrap_or_else(|| vec![Number::integer(1); num_items]);
        if weights.len() != num_items {
            return Err(BlottoError::InvalidInstance(format!(
                "expected {num_items} weights, got {}",
                weights.len()
            )));
        }
        let zero = Number::integer(0);
        if weights.iter().any(|w| !w.is_finite() || *w <= zero) {
            return Err(BlottoError::InvalidInstance("weights must be positive and finite".into()));
        }
        if !unlabeled_cost.is_finite() || unlabeled_cost < zero {
            return Err(BlottoError::InvalidInstance("unlabeled_cost must be non-negative".into()));
        }
        if classes.iter().any(|c| !c.bias.is_finite()) {
            return Err(BlottoError::InvalidInstance("biases must be finite".into()));
        }
        let mut classes: Vec<AgentClass> = classes.into_iter().filter(|c| c.count > 0).collect();
        if classes.is_empty() {
            return Err(BlottoError::InvalidInstance("at least one agent is required".into()));
        }
        classes.sort_by(|x, y| {
            y.count
                .cmp(&x.count)
                .then_with(|| x.bias.partial_cmp(&y.bias).unwrap_or(Ordering::Equal))
        });
        for (i, c) in classes.iter().enumerate() {
            if classes[..i].iter().any(|d| d.bias == c.bias) {
                return Err(BlottoError::InvalidInstance(format!("duplicate bias {}", c.bias)));
            }
        }
        Ok(Instance { num_items, weights, classes, unlabeled_cost, outcome })
    }

    /// Two classes with unit weights.
    pub fn two_class(
        outcome: Outcome,
        num_items: usize,
        (count_a, bias_a): (u32, Number),
        (count_b, bias_b): (u32, Number),
        unlabeled_cost: Number,
    ) -> Result<Self> {
        Instance::new(
            num_items,
            None,
            vec![AgentClass::new(bias_a, count_a), AgentClass::new(bias_b, count_b)],
            unlabeled_cost,
            outcome,
        )
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[AgentClass] {
        &self.classes
    }

    pub fn class(&self, index: usize) -> Result<&AgentClass> {
        self.classes
            .get(index)
            .ok_or(BlottoError::InvalidClass { index, classes: self.classes.len() })
    }

    /// Position of the class with the given bias, if present.
    pub fn class_with_bias(&self, bias: &Number) -> Option<usize> {
        self.classes.iter().position(|c| &c.bias == bias)
    }

    pub fn weights(&self) -> &[Number] {
        &self.weights
    }

    pub fn unlabeled_cost(&self) -> &Number {
        &self.unlabeled_cost
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn total_agents(&self) -> u32 {
        self.classes.iter().map(|c| c.count).sum()
    }

    pub fn counts(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.count).collect()
    }

    /// True when every numeric input is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.unlabeled_cost.is_exact()
            && self.weights.iter().all(Number::is_exact)
            && self.classes.iter().all(|c| c.bias.is_exact())
    }

    pub fn has_equal_weights(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Weights scaled to sum to one.
    pub fn normalized_weights(&self) -> Vec<Number> {
        let total = self.weights.iter().fold(Number::integer(0), |acc, w| &acc + w);
        self.weights.iter().map(|w| w / &total).collect()
    }

    /// Largest absolute difference between any two class biases.
    pub fn max_bias_gap(&self) -> Number {
        let mut lo = self.classes[0].bias.clone();
        let mut hi = lo.clone();
        for c in &self.classes[1..] {
            lo = lo.min(c.bias.clone());
            hi = hi.max(c.bias.clone());
        }
        hi - lo
    }

    /// Same game with a different unlabeled cost.
    pub fn with_unlabeled_cost(&self, unlabeled_cost: Number) -> Result<Self> {
        Instance::new(
            self.num_items,
            Some(self.weights.clone()),
            self.classes.clone(),
            unlabeled_cost,
            self.outcome,
        )
    }

    pub fn with_weights(&self, weights: Vec<Number>) -> Result<Self> {
        Instance::new(
            self.num_items,
            Some(weights),
            self.classes.clone(),
            self.unlabeled_cost.clone(),
            self.outcome,
        )
    }
}

/// Per-item class counts: entry `(i, t)` is the number of class-`t` agents on item `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrangement {
    items: usize,
    classes: usize,
    counts: Vec<u32>,
}

impl Arrangement {
    /// Builds from a row-major `items x classes` buffer.
    pub fn new(items: usize, classes: usize, counts: Vec<u32>) -> Result<Self> {
        if items == 0 || classes == 0 || counts.len() != items * classes {
            return Err(BlottoError::InvalidArrangement(format!(
                "{} entries do not form a {items}x{classes} matrix",
                counts.len()
            )));
        }
        Ok(Arrangement { items, classes, counts })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let classes = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != classes) {
            return Err(BlottoError::InvalidArrangement("ragged rows".into()));
        }
        Arrangement::new(rows.len(), classes, rows.concat())
    }

    pub(crate) fn from_raw(items: usize, classes: usize, counts: Vec<u32>) -> Self {
        debug_assert_eq!(counts.len(), items * classes);
        Arrangement { items, classes, counts }
    }

    pub fn num_items(&self) -> usize {
        self.items
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, item: usize, class: usize) -> u32 {
        self.counts[item * self.classes + class]
    }

    pub fn row(&self, item: usize) -> &[u32] {
        &self.counts[item * self.classes..(item + 1) * self.classes]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.counts.chunks(self.classes)
    }

    pub fn item_total(&self, item: usize) -> u32 {
        self.row(item).iter().sum()
    }

    pub fn column_sum(&self, class: usize) -> u32 {
        self.rows().map(|r| r[class]).sum()
    }

    pub fn empty_items(&self) -> usize {
        (0..self.items).filter(|&i| self.item_total(i) == 0).count()
    }

    /// Arrangement after one class-`class` agent moves from `from` to `to`.
    pub fn with_move(&self, class: usize, from: usize, to: usize) -> Arrangement {
        let mut next = self.clone();
        next.counts[from * self.classes + class] -= 1;
        next.counts[to * self.classes + class] += 1;
        next
    }

    pub fn validate_for(&self, instance: &Instance) -> Result<()> {
        if self.items != instance.num_items() || self.classes != instance.num_classes() {
            return Err(BlottoError::InvalidArrangement(format!(
                "shape {}x{} does not match instance {}x{}",
                self.items,
                self.classes,
                instance.num_items(),
                instance.num_classes()
            )));
        }
        for (t, class) in instance.classes().iter().enumerate() {
            let placed = self.column_sum(t);
            if placed != class.count {
                return Err(BlottoError::InvalidArrangement(format!(
                    "class {t} places {placed} agents but has {}",
                    class.count
                )));
            }
        }
        Ok(())
    }
}

/// A divisible allocation of class mass over items.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalAllocation {
    items: usize,
    classes: usize,
    values: Vec<f64>,
}

impl FractionalAllocation {
    pub const COLUMN_TOLERANCE: f64 = 1e-9;

    pub fn new(instance: &Instance, rows: &[Vec<f64>]) -> Result<Self> {
        let classes = instance.num_classes();
        if rows.len() != instance.num_items() || rows.iter().any(|r| r.len() != classes) {
            return Err(BlottoError::InvalidArrangement("fractional allocation has wrong shape".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(BlottoError::InvalidArrangement("fractional mass must be non-negative".into()));
        }
        for (t, class) in instance.classes().iter().enumerate() {
            let total: f64 = rows.iter().map(|r| r[t]).sum();
            if (total - f64::from(class.count)).abs() > Self::COLUMN_TOLERANCE {
                return Err(BlottoError::InvalidArrangement(format!(
                    "class {t} mass {total} differs from count {}",
                    class.count
                )));
            }
        }
        Ok(FractionalAllocation { items: rows.len(), classes, values: rows.concat() })
    }

    pub fn num_items(&self) -> usize {
        self.items
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, item: usize, class: usize) -> f64 {
        self.values[item * self.classes + class]
    }

    pub fn row(&self, item: usize) -> &[f64] {
        &self.values[item * self.classes..(item + 1) * self.classes]
    }
}

/// Median of a multiset; even cardinalities average the two middle values.
pub fn median_outcome(biases: &[f64]) -> Result<f64> {
    if biases.is_empty() {
        return Err(BlottoError::EmptyItem);
    }
    let mut sorted = biases.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

pub fn mean_outcome(biases: &[f64]) -> Result<f64> {
    if biases.is_empty() {
        return Err(BlottoError::EmptyItem);
    }
    Ok(biases.iter().sum::<f64>() / biases.len() as f64)
}

/// Outcome of one item's multiset, exact when the instance is exact.
/// Returns `None` for an empty item.
pub fn item_outcome(instance: &Instance, arrangement: &Arrangement, item: usize) -> Result<Option<Number>> {
    arrangement.validate_for(instance)?;
    Ok(Engine::new(instance).outcome(arrangement.row(item)))
}

/// Total cost of one agent of `class`: weighted distance to every item's
/// outcome, plus the weighted unlabeled cost of every empty item.
pub fn class_cost(instance: &Instance, arrangement: &Arrangement, class: usize) -> Result<Number> {
    instance.class(class)?;
    arrangement.validate_for(instance)?;
    Ok(Engine::new(instance).class_cost(arrangement, class))
}
