//! Problem data: instances, solutions, objective evaluation and validation.
//!
//! Node `0` is the depot (both the start and the end of every route); visits
//! are nodes `1..=n`. Travel times and arc costs are dense `(n + 1)²` tables.

mod format;
mod solution;
mod validate;

pub use format::{parse_instance, write_instance, ParseError, Precision};
pub use solution::{
    evaluate_objective, parse_solution, write_solution, CostBreakdown, ObjectiveError,
    RouteSchedule, ScheduledStop, Solution, SolutionFormatError,
};
pub use validate::{validate_solution, Violation, TIME_TOLERANCE};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Index of the depot node.
pub const DEPOT: usize = 0;

/// A closed service interval `[lower, upper]` in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub lower: f64,
    pub upper: f64,
}

impl TimeWindow {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "window [{lower}, {upper}] is inverted");
        Self { lower, upper }
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        self.lower <= t && t <= self.upper
    }
}

/// A customer (or, at index 0, the depot).
#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub service_time: f64,
    /// Sorted by `lower`, pairwise disjoint, non-empty.
    pub windows: Vec<TimeWindow>,
}

/// Immutable problem instance. Shareable across concurrent searches.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub precision: Precision,
    nodes: Vec<Visit>,
    travel: Vec<f64>,
    arc_cost: Vec<f64>,
    pub vehicle_capacity: f64,
    pub vehicle_cost: f64,
    pub duration_deadline: f64,
    pub minimise_time: bool,
}

impl Instance {
    /// Builds an instance from a depot and visit list, computing Euclidean
    /// travel times at the given precision. Arc costs equal travel times and
    /// the vehicle cost equals the capacity unless changed afterwards.
    ///
    /// `nodes[0]` is the depot and must carry exactly one window (the horizon).
    pub fn new(name: impl Into<String>, nodes: Vec<Visit>, vehicle_capacity: f64, precision: Precision) -> Self {
        assert!(!nodes.is_empty(), "an instance needs a depot");
        assert_eq!(nodes[DEPOT].windows.len(), 1, "the depot has exactly one window");
        let n = nodes.len();
        let mut travel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (a, b) = (&nodes[i], &nodes[j]);
                    travel[i * n + j] = precision.apply((a.x - b.x).hypot(a.y - b.y));
                }
            }
        }
        let deadline = nodes[DEPOT].windows[0].upper;
        Self {
            name: name.into(),
            precision,
            arc_cost: travel.clone(),
            travel,
            nodes,
            vehicle_capacity,
            vehicle_cost: vehicle_capacity,
            duration_deadline: deadline,
            minimise_time: false,
        }
    }

    /// Replaces the travel-time table (row-major, `(n + 1)²` entries). Arc
    /// costs are reset to the same values.
    pub fn with_travel_matrix(mut self, travel: Vec<f64>) -> Self {
        assert_eq!(travel.len(), self.nodes.len() * self.nodes.len());
        self.arc_cost = travel.clone();
        self.travel = travel;
        self
    }

    /// Overrides the arc-cost table (row-major, `(n + 1)²` entries).
    pub fn with_arc_cost(mut self, arc_cost: Vec<f64>) -> Self {
        assert_eq!(arc_cost.len(), self.nodes.len() * self.nodes.len());
        self.arc_cost = arc_cost;
        self
    }

    /// Number of visits, excluding the depot.
    #[inline]
    pub fn n_visits(&self) -> usize {
        self.nodes.len() - 1
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Visit node indices `1..=n`.
    pub fn visit_ids(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n_visits()
    }

    #[inline]
    pub fn node(&self, i: usize) -> &Visit {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Visit] {
        &self.nodes
    }

    #[inline]
    pub fn travel(&self, i: usize, j: usize) -> f64 {
        self.travel[i * self.nodes.len() + j]
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.arc_cost[i * self.nodes.len() + j]
    }

    #[inline]
    pub fn service(&self, i: usize) -> f64 {
        self.nodes[i].service_time
    }

    #[inline]
    pub fn demand(&self, i: usize) -> f64 {
        self.nodes[i].demand
    }

    #[inline]
    pub fn windows(&self, i: usize) -> &[TimeWindow] {
        &self.nodes[i].windows
    }

    pub fn depot_window(&self) -> TimeWindow {
        self.nodes[DEPOT].windows[0]
    }

    /// Latest admissible return to the depot: the horizon or the deadline,
    /// whichever is earlier.
    #[inline]
    pub fn end_bound(&self) -> f64 {
        self.nodes[DEPOT].windows[0].upper.min(self.duration_deadline)
    }

    /// Window used at both depot positions of a route.
    pub fn route_window(&self) -> TimeWindow {
        TimeWindow::new(self.depot_window().lower, self.end_bound())
    }
}

/// Randomly reassigns the per-visit window sets among the visits. Everything
/// else is unchanged. Deterministic for a fixed seed.
pub fn perturb_instance(instance: &Instance, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<Vec<TimeWindow>> = instance.nodes[1..].iter().map(|v| v.windows.clone()).collect();
    sets.shuffle(&mut rng);
    let mut out = instance.clone();
    for (node, windows) in out.nodes[1..].iter_mut().zip(sets) {
        node.windows = windows;
    }
    out
}

/// A random Solomon-like instance: `n` visits on a 100×100 square around a
/// central depot with horizon `[0, 1000]`, capacity 200, service time 10 and
/// `windows` disjoint windows per visit, each reachable from the depot.
pub fn synthetic_instance(n: usize, windows: usize, seed: u64) -> Instance {
    use rand::Rng;
    assert!(windows >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 1000.0;
    let service = 10.0;
    let mut nodes = vec![Visit {
        id: 0,
        x: 50.0,
        y: 50.0,
        demand: 0.0,
        service_time: 0.0,
        windows: vec![TimeWindow::new(0.0, horizon)],
    }];
    for id in 1..=n {
        let x: f64 = rng.gen_range(0.0..100.0);
        let y: f64 = rng.gen_range(0.0..100.0);
        let d = ((x - 50.0).powi(2) + (y - 50.0).powi(2)).sqrt();
        let (first, last) = (d.ceil(), (horizon - d - service).floor());
        let slot = (last - first) / windows as f64;
        let ws = (0..windows)
            .map(|p| {
                let base = first + slot * p as f64;
                let width = rng.gen_range(0.3..0.9f64) * slot.min(90.0);
                let lower = (base + rng.gen_range(0.0..(slot - width - 1.0).max(0.0))).round();
                TimeWindow::new(lower, (lower + width).round().min(base + slot - 1.0))
            })
            .collect();
        nodes.push(Visit { id, x, y, demand: rng.gen_range(1..=30) as f64, service_time: service, windows: ws });
    }
    Instance::new(format!("synthetic-{n}-{windows}-{seed}"), nodes, 200.0, Precision::Exact)
}
