//! Adaptive large neighbourhood search.
//!
//! A run goes through four steps: greedy construction, improving-only
//! iterations that calibrate the annealing temperature, a route
//! minimisation phase with inflated route and unassigned-visit costs, and a
//! final annealing phase under the original objective.

mod config;
mod destroy;
mod engine;
mod repair;
mod route;
mod search;
mod state;

pub use config::{Component, DestroyOp, Preset, RepairOp, SearchConfig, Termination};
pub use destroy::{
    destroy_cluster, destroy_geometric, destroy_history, destroy_random, destroy_time, pick_rank, removal_count,
    EdgeHistory,
};
pub use engine::{accept, outcome_score, unassigned_threshold, OperatorBank, Outcome, Temperature};
pub use repair::{greedy_construct, repair_regret2, singleton_costs, InsertionCache, RepairContext};
pub use route::{EvalMode, Insertion, Route};
pub use search::{best_result, run, run_many, OperatorStats, Phase, SearchResult, SearchStats, TraceRow, WeightRow};
pub use state::{SearchState, Versions};
