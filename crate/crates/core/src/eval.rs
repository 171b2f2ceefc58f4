//! Cost evaluation kernels, generic over exact and floating-point scalars.

use num_rational::BigRational;

use crate::model::{Arrangement, Instance, Outcome};
use crate::number::{half, Number, Scalar};

pub(crate) struct Evaluator<T> {
    outcome: Outcome,
    biases: Vec<T>,
    ascending: Vec<usize>,
    weights: Vec<T>,
    unlabeled: T,
}

/// A single-agent move that strictly lowers the mover's cost.
pub(crate) struct Improvement<T> {
    pub class: usize,
    pub from: usize,
    pub to: usize,
    pub before: T,
    pub delta: T,
}

impl<T: Scalar> Evaluator<T> {
    pub fn new(instance: &Instance) -> Self {
        let biases: Vec<T> = instance.classes().iter().map(|c| T::from_number(&c.bias)).collect();
        let mut ascending: Vec<usize> = (0..biases.len()).collect();
        ascending.sort_by(|&a, &b| instance.classes()[a].bias.partial_cmp(&instance.classes()[b].bias).unwrap());
        Evaluator {
            outcome: instance.outcome(),
            biases,
            ascending,
            weights: instance.weights().iter().map(T::from_number).collect(),
            unlabeled: T::from_number(instance.unlabeled_cost()),
        }
    }

    /// Outcome of `row` with class `adjust.0` shifted by `adjust.1` agents.
    fn outcome_adjusted(&self, row: &[u32], adjust: (usize, i64)) -> Option<T> {
        let count = |t: usize| -> u64 {
            let base = i64::from(row[t]);
            (if t == adjust.0 { base + adjust.1 } else { base }) as u64
        };
        let total: u64 = (0..row.len()).map(count).sum();
        if total == 0 {
            return None;
        }
        match self.outcome {
            Outcome::Mean => {
                let mut sum = T::zero();
                for (t, bias) in self.biases.iter().enumerate() {
                    let c = count(t);
                    if c > 0 {
                        sum = sum + bias.clone() * T::from_count(c);
                    }
                }
                Some(sum / T::from_count(total))
            }
            Outcome::Median => {
                // k-th smallest element of the multiset, zero-based
                let kth = |k: u64| -> T {
                    let mut seen = 0;
                    for &t in &self.ascending {
                        seen += count(t);
                        if seen > k {
                            return self.biases[t].clone();
                        }
                    }
                    unreachable!("rank beyond multiset size")
                };
                if total % 2 == 1 {
                    Some(kth(total / 2))
                } else {
                    Some((kth(total / 2 - 1) + kth(total / 2)) * half())
                }
            }
        }
    }

    pub fn outcome(&self, row: &[u32]) -> Option<T> {
        self.outcome_adjusted(row, (0, 0))
    }

    fn item_cost(&self, row: &[u32], item: usize, class: usize, adjust: (usize, i64)) -> T {
        let w = self.weights[item].clone();
        match self.outcome_adjusted(row, adjust) {
            Some(out) => w * (out - self.biases[class].clone()).abs_value(),
            None => w * self.unlabeled.clone(),
        }
    }

    pub fn class_cost(&self, arrangement: &Arrangement, class: usize) -> T {
        let mut total = T::zero();
        for (i, row) in arrangement.rows().enumerate() {
            total = total + self.item_cost(row, i, class, (0, 0));
        }
        total
    }

    /// Change in the mover's cost when one `class` agent goes from `from` to `to`.
    pub fn move_delta(&self, arrangement: &Arrangement, class: usize, from: usize, to: usize) -> T {
        let (rf, rt) = (arrangement.row(from), arrangement.row(to));
        let from_change = self.item_cost(rf, from, class, (class, -1)) - self.item_cost(rf, from, class, (0, 0));
        let to_change = self.item_cost(rt, to, class, (class, 1)) - self.item_cost(rt, to, class, (0, 0));
        from_change + to_change
    }

    /// Visits improving moves in (class, from, to) order until `visit` returns false.
    pub fn for_each_improvement(&self, arrangement: &Arrangement, mut visit: impl FnMut(Improvement<T>) -> bool) {
        let m = arrangement.num_items();
        for class in 0..arrangement.num_classes() {
            let mut before: Option<T> = None;
            for from in 0..m {
                if arrangement.get(from, class) == 0 {
                    continue;
                }
                for to in 0..m {
                    if to == from {
                        continue;
                    }
                    let delta = self.move_delta(arrangement, class, from, to);
                    let cost = before.get_or_insert_with(|| self.class_cost(arrangement, class));
                    if T::improves(&delta, cost) {
                        let keep_going = visit(Improvement { class, from, to, before: cost.clone(), delta });
                        if !keep_going {
                            return;
                        }
                    }
                }
            }
        }
    }

    pub fn first_improvement(&self, arrangement: &Arrangement) -> Option<Improvement<T>> {
        let mut found = None;
        self.for_each_improvement(arrangement, |imp| {
            found = Some(imp);
            false
        });
        found
    }

    /// Largest decrease; ties keep the earliest move in scan order.
    pub fn best_improvement(&self, arrangement: &Arrangement) -> Option<Improvement<T>> {
        let mut best: Option<Improvement<T>> = None;
        self.for_each_improvement(arrangement, |imp| {
            if best.as_ref().is_none_or(|b| imp.delta < b.delta) {
                best = Some(imp);
            }
            true
        });
        best
    }
}

/// Dispatches to the exact kernel when every input is rational.
pub(crate) enum Engine {
    Exact(Evaluator<BigRational>),
    Float(Evaluator<f64>),
}

/// Scalar-erased improving move.
pub(crate) struct Move {
    pub class: usize,
    pub from: usize,
    pub to: usize,
    pub before: Number,
    pub after: Number,
}

fn erase<T: Scalar>(imp: Improvement<T>) -> Move {
    let after = imp.before.clone() + imp.delta;
    Move { class: imp.class, from: imp.from, to: imp.to, before: imp.before.into_number(), after: after.into_number() }
}

impl Engine {
    pub fn new(instance: &Instance) -> Self {
        if instance.is_exact() {
            Engine::Exact(Evaluator::new(instance))
        } else {
            Engine::Float(Evaluator::new(instance))
        }
    }

    pub fn outcome(&self, row: &[u32]) -> Option<Number> {
        match self {
            Engine::Exact(e) => e.outcome(row).map(Scalar::into_number),
            Engine::Float(e) => e.outcome(row).map(Scalar::into_number),
        }
    }

    pub fn class_cost(&self, arrangement: &Arrangement, class: usize) -> Number {
        match self {
            Engine::Exact(e) => e.class_cost(arrangement, class).into_number(),
            Engine::Float(e) => e.class_cost(arrangement, class).into_number(),
        }
    }

    pub fn is_stable(&self, arrangement: &Arrangement) -> bool {
        match self {
            Engine::Exact(e) => e.first_improvement(arrangement).is_none(),
            Engine::Float(e) => e.first_improvement(arrangement).is_none(),
        }
    }

    pub fn first_improvement(&self, arrangement: &Arrangement) -> Option<Move> {
        match self {
            Engine::Exact(e) => e.first_improvement(arrangement).map(erase),
            Engine::Float(e) => e.first_improvement(arrangement).map(erase),
        }
    }

    pub fn best_improvement(&self, arrangement: &Arrangement) -> Option<Move> {
        match self {
            Engine::Exact(e) => e.best_improvement(arrangement).map(erase),
            Engine::Float(e) => e.best_improvement(arrangement).map(erase),
        }
    }

    pub fn all_improvements(&self, arrangement: &Arrangement) -> Vec<Move> {
        let mut out = Vec::new();
        match self {
            Engine::Exact(e) => e.for_each_improvement(arrangement, |imp| {
                out.push(erase(imp));
                true
            }),
            Engine::Float(e) => e.for_each_improvement(arrangement, |imp| {
                out.push(erase(imp));
                true
            }),
        }
        out
    }
}
