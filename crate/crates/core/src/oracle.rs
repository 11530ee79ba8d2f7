//! Brute-force reference evaluators.
//!
//! These enumerate every window assignment of a route and are only meant as
//! ground truth for the label-based evaluation on small routes.
//!
//! For a fixed assignment the service start at every stop is
//! `max(start + T_k, C_k)`, piecewise linear in the route start with slope 0
//! or 1, and the route is timely for starts in an interval bounded by the
//! depot opening and by `u_k - T_k` at every stop (`T_k` being cumulative
//! travel and service up to stop `k`). The duration `max(T, C - start)` is
//! therefore minimised at one of the breakpoints `l_k - T_k`, `u_k - T_k`,
//! the deadline breakpoint or the depot opening, and it suffices to
//! simulate those.

use thiserror::Error;

use crate::model::{Instance, DEPOT};

/// Upper limit on enumerated window assignments.
pub const MAX_COMBINATIONS: u128 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{0} window assignments exceed the enumeration guard")]
    TooManyCombinations(u128),
}

/// An optimal timing found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentSchedule {
    /// Window index per visit.
    pub window_choice: Vec<usize>,
    pub route_start: f64,
    pub duration: f64,
}

/// Slack on upper bounds so that breakpoint starts `u_k - T_k` survive
/// rounding when `T_k` is re-accumulated.
const EPS: f64 = 1e-9;

/// Simulates earliest service from `start` with the given windows. Returns
/// the depot return time, or `None` if a window is missed or the deadline
/// is exceeded.
fn simulate(instance: &Instance, route: &[usize], choice: &[usize], start: f64) -> Option<f64> {
    let mut prev = DEPOT;
    let mut t = start;
    for (&v, &p) in route.iter().zip(choice) {
        let w = instance.windows(v)[p];
        let arrival = t + instance.service(prev) + instance.travel(prev, v);
        if arrival > w.upper + EPS {
            return None;
        }
        t = arrival.max(w.lower);
        prev = v;
    }
    let end = t + instance.service(prev) + instance.travel(prev, DEPOT);
    (end <= instance.end_bound() + EPS).then_some(end)
}

/// Minimal route duration by exhaustive enumeration of window assignments.
pub fn oracle_min_duration(instance: &Instance, route: &[usize]) -> Result<Option<AssignmentSchedule>, OracleError> {
    let combos: u128 = route.iter().map(|&v| instance.windows(v).len() as u128).product();
    if combos > MAX_COMBINATIONS {
        return Err(OracleError::TooManyCombinations(combos));
    }
    let horizon = instance.route_window();
    let mut choice = vec![0usize; route.len()];
    let mut best: Option<AssignmentSchedule> = None;
    let mut candidates = Vec::with_capacity(2 * route.len() + 2);

    loop {
        candidates.clear();
        candidates.push(horizon.lower);
        let mut cum = 0.0;
        let mut prev = DEPOT;
        for (&v, &p) in route.iter().zip(&choice) {
            cum += instance.service(prev) + instance.travel(prev, v);
            let w = instance.windows(v)[p];
            candidates.push(w.lower - cum);
            candidates.push(w.upper - cum);
            prev = v;
        }
        cum += instance.service(prev) + instance.travel(prev, DEPOT);
        candidates.push(horizon.upper - cum);

        for &start in &candidates {
            if start < horizon.lower || start > horizon.upper {
                continue;
            }
            if let Some(end) = simulate(instance, route, &choice, start) {
                let duration = end - start;
                if best.as_ref().is_none_or(|b| duration < b.duration) {
                    best = Some(AssignmentSchedule { window_choice: choice.clone(), route_start: start, duration });
                }
            }
        }

        // Mixed-radix increment over window indices.
        let mut k = 0;
        loop {
            if k == route.len() {
                return Ok(best);
            }
            choice[k] += 1;
            if choice[k] < instance.windows(route[k]).len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Effect of inserting one visit, computed by materialising the new route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleInsertion {
    pub distance_delta: f64,
    pub travel_delta: f64,
    /// Zero when time is not minimised.
    pub duration_delta: f64,
    pub new_duration: f64,
    pub minimise_time: bool,
}

impl OracleInsertion {
    /// Duration change plus arc-cost change (arc-cost change alone when time
    /// is not minimised).
    pub fn delta(&self) -> f64 {
        self.duration_delta + self.distance_delta
    }

    /// Change of the objective's arc-cost plus service-and-waiting terms.
    pub fn objective_delta(&self) -> f64 {
        if self.minimise_time {
            self.distance_delta + self.duration_delta - self.travel_delta
        } else {
            self.distance_delta
        }
    }
}

fn route_sum(instance: &Instance, route: &[usize], f: impl Fn(&Instance, usize, usize) -> f64) -> f64 {
    let mut prev = DEPOT;
    let mut sum = 0.0;
    for &v in route.iter().chain(std::iter::once(&DEPOT)) {
        sum += f(instance, prev, v);
        prev = v;
    }
    sum
}

/// Inserts `visit` after position `position` (0 = start depot) and compares
/// full evaluations before and after. `None` if the new route is untimely.
pub fn oracle_cheapest_insertion(
    instance: &Instance,
    route: &[usize],
    position: usize,
    visit: usize,
    minimise_time: bool,
) -> Result<Option<OracleInsertion>, OracleError> {
    let mut after = route.to_vec();
    after.insert(position, visit);
    let Some(new) = oracle_min_duration(instance, &after)? else {
        return Ok(None);
    };
    let distance_delta = route_sum(instance, &after, Instance::cost) - route_sum(instance, route, Instance::cost);
    let travel_delta = route_sum(instance, &after, Instance::travel) - route_sum(instance, route, Instance::travel);
    if !minimise_time {
        return Ok(Some(OracleInsertion { distance_delta, travel_delta, duration_delta: 0.0, new_duration: 0.0, minimise_time: false }));
    }
    let Some(old) = oracle_min_duration(instance, route)? else {
        return Ok(None);
    };
    Ok(Some(OracleInsertion {
        distance_delta,
        travel_delta,
        duration_delta: new.duration - old.duration,
        new_duration: new.duration,
        minimise_time: true,
    }))
}
