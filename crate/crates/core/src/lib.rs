//! Private Blotto games.
//!
//! Agents of a few bias classes spread over weighted items; each item's
//! outcome aggregates the biases present on it (median or mean) and every
//! agent pays its weighted distance to each outcome, plus a fixed cost for
//! every item nobody covers. This crate decides pure-Nash stability by
//! exhaustive search, builds stable arrangements in closed form, and measures
//! how far equilibria drift from the proportional allocation.

pub mod analysis;
pub mod constructive;
pub mod error;
mod eval;
pub mod format;
pub mod model;
pub mod number;
pub mod scan;
pub mod stability;

pub use analysis::{
    check_close_to_proportional, construct_high_misallocation, fractional_equilibrium, fractional_foc_report,
    fractional_foc_residual, misallocated_effort, scenario_no_ne_mean, scenario_no_ne_median,
    scenario_weighted_median_no_ne, three_agent_instance, three_agent_regime, EffortReport, FocReport,
    ThreeAgentRegime,
};
pub use constructive::{
    arrangement_from_roles, auto_unlabeled_cost, construct_many_agents, construct_tie_based, empty_threshold,
    in_median_critical_region, reference_instance, singleton_arrangement, stabilizing_weights, stable_exists_median,
    RegionVariant, StabilizingWeights,
};
pub use error::{BlottoError, Result};
pub use format::{format_arrangement, instance_to_json, parse_arrangement, parse_instance};
pub use model::{
    class_cost, item_outcome, mean_outcome, median_outcome, AgentClass, Arrangement, FractionalAllocation, Instance,
    Outcome,
};
pub use number::Number;
pub use scan::{export_region, scan_region, Cell, CellStatus, CuPolicy, ExportFormat, RegionMap, ScanConfig};
pub use stability::{
    best_response_dynamics, deviations, enumerate_arrangements, find_stable, find_stable_canonical, find_stable_with,
    is_stable, DeviationWitness, Policy, SearchMode, SearchOptions, StabilityReport, Terminal, Trajectory,
};
