//! Solver for the vehicle routing problem with multiple time windows.
//!
//! * [`model`]: instances, solutions, objective and validation.
//! * [`schedule`]: constant-amortised insertion evaluation (slack
//!   recurrences, and label fronts when route time is minimised).
//! * [`oracle`]: brute-force reference evaluators for small routes.
//! * [`alns`]: adaptive large neighbourhood search.

pub mod alns;
pub mod model;
pub mod oracle;
pub mod schedule;
