//! Pure-Nash stability: single-agent deviations, exhaustive search and
//! best-response dynamics.

pub mod dynamics;
pub mod enumerate;

use rayon::prelude::*;

use crate::error::Result;
use crate::eval::{Engine, Move};
use crate::model::{Arrangement, Instance};
use crate::number::Number;

pub use dynamics::{best_response_dynamics, Policy, Terminal, Trajectory};
pub use enumerate::{
    arrangement_count, binomial, composition_count, enumerate_arrangements, enumerate_arrangements_within,
    Arrangements, Compositions, DEFAULT_SEARCH_BUDGET,
};

/// A strictly improving single-agent move.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationWitness {
    pub class_index: usize,
    pub from_item: usize,
    pub to_item: usize,
    pub cost_before: Number,
    pub cost_after: Number,
}

impl DeviationWitness {
    /// `cost_after - cost_before`; always negative.
    pub fn delta(&self) -> Number {
        &self.cost_after - &self.cost_before
    }
}

impl From<Move> for DeviationWitness {
    fn from(m: Move) -> Self {
        DeviationWitness { class_index: m.class, from_item: m.from, to_item: m.to, cost_before: m.before, cost_after: m.after }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub witness: Option<DeviationWitness>,
}

/// Every improving move, in (class, from, to) order.
pub fn deviations(instance: &Instance, arrangement: &Arrangement) -> Result<Vec<DeviationWitness>> {
    arrangement.validate_for(instance)?;
    Ok(Engine::new(instance).all_improvements(arrangement).into_iter().map(Into::into).collect())
}

/// Stability verdict with the first improving move as witness.
pub fn is_stable(instance: &Instance, arrangement: &Arrangement) -> Result<StabilityReport> {
    arrangement.validate_for(instance)?;
    let witness = Engine::new(instance).first_improvement(arrangement).map(DeviationWitness::from);
    Ok(StabilityReport { stable: witness.is_none(), witness })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    First,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest arrangement space the search will walk.
    pub budget: u64,
    /// Split the space across the rayon pool.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: DEFAULT_SEARCH_BUDGET, parallel: true }
    }
}

// Below this size the thread hand-off costs more than the search.
const PARALLEL_THRESHOLD: u128 = 4096;

/// Stable arrangements in enumeration order. `First` returns at most one,
/// and it is the first stable arrangement of the sequential order.
pub fn find_stable(instance: &Instance, mode: SearchMode) -> Result<Vec<Arrangement>> {
    find_stable_with(instance, mode, &SearchOptions::default())
}

pub fn find_stable_with(instance: &Instance, mode: SearchMode, options: &SearchOptions) -> Result<Vec<Arrangement>> {
    let size = enumerate::check_budget(instance, options.budget)?;
    let engine = Engine::new(instance);
    if !options.parallel || size < PARALLEL_THRESHOLD {
        let mut stable = Arrangements::new(instance).filter(|a| engine.is_stable(a));
        return Ok(match mode {
            SearchMode::First => stable.next().into_iter().collect(),
            SearchMode::All => stable.collect(),
        });
    }
    let m = instance.num_items();
    let totals = instance.counts();
    let prefixes: Vec<Vec<u32>> = Compositions::new(totals[0], m).collect();
    let chunk = |prefix: &Vec<u32>| Arrangements::with_prefix(m, &totals, Some(prefix.clone()));
    Ok(match mode {
        SearchMode::First => prefixes
            .par_iter()
            .find_map_first(|p| chunk(p).find(|a| engine.is_stable(a)))
            .into_iter()
            .collect(),
        SearchMode::All => prefixes
            .par_iter()
            .map(|p| chunk(p).filter(|a| engine.is_stable(a)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .concat(),
    })
}

/// Stable arrangements up to item permutation, each with the number of
/// arrangements it stands for. Representatives have rows in non-increasing
/// lexicographic order. Unequal weights break the symmetry, so every stable
/// arrangement is then reported with multiplicity one.
pub fn find_stable_canonical(instance: &Instance, mode: SearchMode, budget: u64) -> Result<Vec<(Arrangement, u128)>> {
    if !instance.has_equal_weights() {
        let options = SearchOptions { budget, parallel: true };
        return Ok(find_stable_with(instance, mode, &options)?.into_iter().map(|a| (a, 1)).collect());
    }
    enumerate::check_budget(instance, budget)?;
    let engine = Engine::new(instance);
    let candidates = enumerate::canonical_arrangements(instance);
    Ok(match mode {
        SearchMode::First => candidates.into_par_iter().find_first(|(a, _)| engine.is_stable(a)).into_iter().collect(),
        SearchMode::All => candidates.into_par_iter().filter(|(a, _)| engine.is_stable(a)).collect(),
    })
}
