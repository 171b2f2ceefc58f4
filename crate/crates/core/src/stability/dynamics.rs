//! Best-response dynamics with cycle detection.

use std::collections::HashMap;

use crate::error::Result;
use crate::eval::Engine;
use crate::model::{Arrangement, Instance};
use crate::stability::DeviationWitness;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// First improving move in (class, from, to) order.
    FirstImproving,
    /// Largest cost decrease; ties go to the earliest move.
    BestImproving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    ReachedStable,
    /// The last state repeats the state at this index.
    CycleDetected(usize),
    StepBudgetExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Arrangement>,
    /// `moves[k]` leads from `states[k]` to `states[k + 1]`.
    pub moves: Vec<DeviationWitness>,
    pub terminal: Terminal,
}

pub fn best_response_dynamics(
    instance: &Instance,
    start: &Arrangement,
    policy: Policy,
    max_steps: usize,
) -> Result<Trajectory> {
    start.validate_for(instance)?;
    let engine = Engine::new(instance);
    let mut states = vec![start.clone()];
    let mut moves = Vec::new();
    let mut seen = HashMap::from([(start.clone(), 0usize)]);
    loop {
        let current = states.last().expect("trajectory is never empty");
        let next = match policy {
            Policy::FirstImproving => engine.first_improvement(current),
            Policy::BestImproving => engine.best_improvement(current),
        };
        let Some(mv) = next else {
            return Ok(Trajectory { states, moves, terminal: Terminal::ReachedStable });
        };
        if moves.len() == max_steps {
            return Ok(Trajectory { states, moves, terminal: Terminal::StepBudgetExhausted });
        }
        let state = current.with_move(mv.class, mv.from, mv.to);
        moves.push(mv.into());
        let index = states.len();
        states.push(state.clone());
        if let Some(&first) = seen.get(&state) {
            return Ok(Trajectory { states, moves, terminal: Terminal::CycleDetected(first) });
        }
        seen.insert(state, index);
    }
}
