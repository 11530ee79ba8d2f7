//! Delta evaluation of insertions.
//!
//! Routes are addressed by position: position `0` is the start depot,
//! positions `1..=n` the visits and `n + 1` the end depot. "Insert after
//! position `i`" places the new visit between positions `i` and `i + 1`.
//!
//! Without time minimisation a route keeps earliest and latest service starts
//! per position ([`SlackState`]). With time minimisation it keeps Pareto
//! fronts of backward and forward labels ([`RouteEvalState`]) that summarise
//! every non-dominated way to time the prefix up to, and the suffix from, a
//! position under any window assignment.

mod labels;
mod slack;

pub use labels::{
    build_labels, cheapest_insertion_b1, dominates_backward, dominates_forward, expand_backward, expand_forward,
    min_route_duration, BackwardLabel, ForwardLabel, LabelInsertion, RouteEvalState, RouteTiming,
};
pub(crate) use labels::timing_from_state;
pub use slack::{delta_distance, feasible_insertion_b0, first_feasible_window_b0, update_slacks, SlackState};

use crate::model::{Instance, TimeWindow, DEPOT};

/// A visit sequence bound to its instance. Optionally every visit is pinned
/// to one of its windows (fixed-window evaluation).
#[derive(Debug, Clone, Copy)]
pub struct RouteView<'a> {
    pub instance: &'a Instance,
    pub visits: &'a [usize],
    fixed: Option<&'a [usize]>,
    depot: [TimeWindow; 1],
}

impl<'a> RouteView<'a> {
    pub fn new(instance: &'a Instance, visits: &'a [usize]) -> Self {
        Self { instance, visits, fixed: None, depot: [instance.route_window()] }
    }

    /// Each `visits[k]` may only use window `fixed[k]`.
    pub fn with_fixed_windows(instance: &'a Instance, visits: &'a [usize], fixed: &'a [usize]) -> Self {
        assert_eq!(visits.len(), fixed.len());
        Self { instance, visits, fixed: Some(fixed), depot: [instance.route_window()] }
    }

    /// Number of positions including both depots.
    #[inline]
    pub fn positions(&self) -> usize {
        self.visits.len() + 2
    }

    #[inline]
    pub fn node(&self, pos: usize) -> usize {
        if pos == 0 || pos > self.visits.len() {
            DEPOT
        } else {
            self.visits[pos - 1]
        }
    }

    /// Admissible windows at a position and the index of the first one in the
    /// node's own window list.
    #[inline]
    pub fn windows(&self, pos: usize) -> (&[TimeWindow], usize) {
        if pos == 0 || pos > self.visits.len() {
            return (&self.depot, 0);
        }
        let v = self.visits[pos - 1];
        match self.fixed {
            Some(f) => {
                let w = f[pos - 1];
                (std::slice::from_ref(&self.instance.windows(v)[w]), w)
            }
            None => (self.instance.windows(v), 0),
        }
    }

    /// Sum of travel times along the route, depot legs included.
    pub fn travel_sum(&self) -> f64 {
        (0..self.positions() - 1).map(|p| self.instance.travel(self.node(p), self.node(p + 1))).sum()
    }

    /// Sum of arc costs along the route, depot legs included.
    pub fn distance(&self) -> f64 {
        (0..self.positions() - 1).map(|p| self.instance.cost(self.node(p), self.node(p + 1))).sum()
    }
}
