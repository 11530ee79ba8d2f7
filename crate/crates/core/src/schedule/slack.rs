use super::RouteView;
use crate::model::{RouteSchedule, ScheduledStop};

/// Earliest and latest service start per route position.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackState {
    pub es: Vec<f64>,
    pub ls: Vec<f64>,
    /// Window (node-local index) attaining `es` at each position.
    pub es_window: Vec<usize>,
    pub feasible: bool,
}

impl SlackState {
    /// The earliest-start schedule: depart when the depot opens and serve
    /// every visit as early as possible.
    pub fn earliest_schedule(&self, view: &RouteView) -> RouteSchedule {
        RouteSchedule {
            start: self.es[0],
            stops: view
                .visits
                .iter()
                .enumerate()
                .map(|(k, &v)| ScheduledStop { visit: v, window: self.es_window[k + 1], service_start: self.es[k + 1] })
                .collect(),
        }
    }
}

/// Computes earliest starts left to right and latest starts right to left.
///
/// `es` takes the first window still open on arrival, `ls` the last window
/// already open at the latest departure that keeps the suffix timely.
/// Unreachable positions get `es = +inf` / `ls = -inf` and mark the route
/// infeasible.
pub fn update_slacks(view: &RouteView) -> SlackState {
    let inst = view.instance;
    let m = view.positions();
    let mut es = vec![f64::INFINITY; m];
    let mut es_window = vec![0; m];
    let mut ls = vec![f64::NEG_INFINITY; m];

    let (w0, _) = view.windows(0);
    es[0] = w0.iter().map(|w| w.lower).fold(f64::INFINITY, f64::min);
    for pos in 1..m {
        let prev = view.node(pos - 1);
        let arrival = es[pos - 1] + inst.service(prev) + inst.travel(prev, view.node(pos));
        let (windows, offset) = view.windows(pos);
        // Windows are sorted, so the first one open on arrival gives the minimum.
        match windows.iter().position(|w| w.upper >= arrival) {
            Some(p) => {
                es[pos] = arrival.max(windows[p].lower);
                es_window[pos] = offset + p;
            }
            None => break,
        }
    }

    let (wl, _) = view.windows(m - 1);
    ls[m - 1] = wl.iter().map(|w| w.upper).fold(f64::NEG_INFINITY, f64::max);
    for pos in (0..m - 1).rev() {
        let node = view.node(pos);
        let departure = ls[pos + 1] - inst.travel(node, view.node(pos + 1)) - inst.service(node);
        let (windows, _) = view.windows(pos);
        match windows.iter().rposition(|w| w.lower <= departure) {
            Some(p) => ls[pos] = departure.min(windows[p].upper),
            None => break,
        }
    }

    let feasible = es[m - 1].is_finite() && es[m - 1] <= ls[m - 1];
    SlackState { es, ls, es_window, feasible }
}

#[inline]
fn insertion_band(view: &RouteView, state: &SlackState, i: usize, j: usize) -> (f64, f64) {
    let inst = view.instance;
    let (a, b) = (view.node(i), view.node(i + 1));
    let earliest = state.es[i] + inst.service(a) + inst.travel(a, j);
    let latest = state.ls[i + 1] - inst.travel(j, b) - inst.service(j);
    (earliest, latest)
}

/// Feasibility of inserting `j` after position `i`, per window of `j`.
///
/// Window `p` passes when the earliest arrival does not miss it, the latest
/// start keeping the successor timely does not precede it, and the earliest
/// arrival is no later than that latest start.
pub fn feasible_insertion_b0(view: &RouteView, state: &SlackState, i: usize, j: usize) -> Vec<bool> {
    let (earliest, latest) = insertion_band(view, state, i, j);
    view.instance
        .windows(j)
        .iter()
        .map(|w| earliest <= w.upper && latest >= w.lower && earliest <= latest)
        .collect()
}

/// First window of `j` admitting insertion after position `i`, if any.
#[inline]
pub fn first_feasible_window_b0(view: &RouteView, state: &SlackState, i: usize, j: usize) -> Option<usize> {
    let (earliest, latest) = insertion_band(view, state, i, j);
    if earliest > latest {
        return None;
    }
    view.instance.windows(j).iter().position(|w| earliest <= w.upper && latest >= w.lower)
}

/// Arc-cost change of inserting `j` after position `i`.
#[inline]
pub fn delta_distance(view: &RouteView, i: usize, j: usize) -> f64 {
    let inst = view.instance;
    let (a, b) = (view.node(i), view.node(i + 1));
    inst.cost(a, j) + inst.cost(j, b) - inst.cost(a, b)
}
