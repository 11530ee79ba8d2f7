//! Backward/forward labels for routes whose duration is minimised.
//!
//! A backward label `(es, bs, st)` at a position describes one window
//! assignment of the prefix: service there can start at `es` at the
//! earliest, and for any service start `x >= es` the latest route start that
//! still makes it is `st + min(x - es, bs)`. A forward label `(ls, fs, et)`
//! mirrors this for the suffix: for a service start `y <= ls` the earliest
//! return to the depot is `et - min(ls - y, fs)`.
//!
//! Depot base labels use the route horizon in place of infinity: the start
//! depot carries `(E, D - E, E)` and the end depot `(D, D - E, D)` where
//! `[E, D]` is the depot opening and the return deadline.

use std::cmp::Ordering;

use super::RouteView;
use crate::model::{RouteSchedule, ScheduledStop, TimeWindow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardLabel {
    pub es: f64,
    pub bs: f64,
    pub st: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardLabel {
    pub ls: f64,
    pub fs: f64,
    pub et: f64,
}

/// Extends a backward label at the predecessor through `window` of the next
/// visit. `travel` is the leg time and `service` the predecessor's service
/// time. `None` when the window closes before the earliest arrival.
///
/// Slack consumed by waiting for the window to open moves the start later;
/// the remaining slack is also capped by how far service can slide before the
/// window closes.
#[inline]
pub fn expand_backward(label: &BackwardLabel, window: &TimeWindow, travel: f64, service: f64) -> Option<BackwardLabel> {
    let arrival = label.es + service + travel;
    if arrival > window.upper {
        return None;
    }
    let es = arrival.max(window.lower);
    let gap = (window.lower - arrival).max(0.0);
    Some(BackwardLabel {
        es,
        bs: (label.bs - gap).max(0.0).min(window.upper - es),
        st: label.st + gap.min(label.bs),
    })
}

/// Extends a forward label at the successor back through `window` of the
/// preceding visit. `travel` is the leg time and `service` the preceding
/// visit's service time. `None` when the window opens after the latest start.
///
/// Mirror of [`expand_backward`]: when the window closes before the latest
/// start, the suffix is pulled earlier and its end time drops by the slack
/// that absorbs it, i.e. `et_i = et_j - (fs_j - fs_i)` while the lower-bound
/// cap is not binding.
#[inline]
pub fn expand_forward(label: &ForwardLabel, window: &TimeWindow, travel: f64, service: f64) -> Option<ForwardLabel> {
    let latest = label.ls - travel - service;
    if latest < window.lower {
        return None;
    }
    let ls = latest.min(window.upper);
    let gap = (latest - window.upper).max(0.0);
    Some(ForwardLabel {
        ls,
        fs: (label.fs - gap).max(0.0).min(ls - window.lower),
        et: label.et - gap.min(label.fs),
    })
}

/// `a` can start at least as late and be served no later than `b`.
#[inline]
pub fn dominates_backward(a: &BackwardLabel, b: &BackwardLabel) -> bool {
    a.st + a.bs >= b.st + b.bs && a.es <= b.es
}

/// `a` ends no later and starts no earlier than `b`.
#[inline]
pub fn dominates_forward(a: &ForwardLabel, b: &ForwardLabel) -> bool {
    a.et - a.fs <= b.et - b.fs && a.ls >= b.ls
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Parent {
    label: u32,
    window: u32,
}

/// Label fronts for every position of a route.
///
/// Backward fronts are sorted by `es` ascending, forward fronts by `ls`
/// descending. Fronts are stored flat with per-position offsets.
#[derive(Debug, Clone, Default)]
pub struct RouteEvalState {
    back: Vec<BackwardLabel>,
    back_parent: Vec<Parent>,
    back_off: Vec<usize>,
    fwd: Vec<ForwardLabel>,
    fwd_off: Vec<usize>,
}

impl RouteEvalState {
    pub fn positions(&self) -> usize {
        self.back_off.len() - 1
    }

    pub fn backward(&self, pos: usize) -> &[BackwardLabel] {
        &self.back[self.back_off[pos]..self.back_off[pos + 1]]
    }

    pub fn forward(&self, pos: usize) -> &[ForwardLabel] {
        &self.fwd[self.fwd_off[pos]..self.fwd_off[pos + 1]]
    }

    /// A route is feasible iff every position keeps at least one label.
    pub fn is_feasible(&self) -> bool {
        (0..self.positions()).all(|p| !self.backward(p).is_empty() && !self.forward(p).is_empty())
    }

    /// Minimal route duration, read from the end-depot backward front.
    pub fn duration(&self) -> Option<f64> {
        self.backward(self.positions() - 1).iter().map(|l| l.es - l.st).min_by(f64::total_cmp)
    }

    /// Total number of stored labels.
    pub fn label_count(&self) -> usize {
        self.back.len() + self.fwd.len()
    }
}

/// Builds backward fronts left to right and forward fronts right to left.
/// With `prune` off, every generated label is kept (still sorted), which
/// serves as a reference for the pruned computation.
pub fn build_labels(view: &RouteView, prune: bool) -> RouteEvalState {
    let mut state = RouteEvalState::default();
    build_backward(view, prune, &mut state);
    build_forward(view, prune, &mut state);
    state
}

fn build_backward(view: &RouteView, prune: bool, state: &mut RouteEvalState) {
    let inst = view.instance;
    let m = view.positions();
    let horizon = inst.route_window();
    state.back.clear();
    state.back_parent.clear();
    state.back_off.clear();
    state.back_off.push(0);
    state.back.push(BackwardLabel { es: horizon.lower, bs: horizon.upper - horizon.lower, st: horizon.lower });
    state.back_parent.push(Parent { label: 0, window: 0 });
    state.back_off.push(1);

    let mut cand: Vec<(BackwardLabel, Parent)> = Vec::new();
    for pos in 1..m {
        let prev = view.node(pos - 1);
        let travel = inst.travel(prev, view.node(pos));
        let service = inst.service(prev);
        let (windows, offset) = view.windows(pos);
        let base = state.back_off[pos - 1];
        cand.clear();
        for (k, label) in state.back[base..state.back_off[pos]].iter().enumerate() {
            for (p, w) in windows.iter().enumerate() {
                if let Some(next) = expand_backward(label, w, travel, service) {
                    cand.push((next, Parent { label: k as u32, window: (offset + p) as u32 }));
                }
            }
        }
        // es ascending, then latest start (st + bs) descending; stable keeps
        // the first of equal labels.
        cand.sort_by(|a, b| a.0.es.total_cmp(&b.0.es).then_with(|| (b.0.st + b.0.bs).total_cmp(&(a.0.st + a.0.bs))));
        let mut reach = f64::NEG_INFINITY;
        for &(label, parent) in &cand {
            let r = label.st + label.bs;
            if !prune || r > reach {
                reach = reach.max(r);
                state.back.push(label);
                state.back_parent.push(parent);
            }
        }
        state.back_off.push(state.back.len());
    }
}

fn build_forward(view: &RouteView, prune: bool, state: &mut RouteEvalState) {
    let inst = view.instance;
    let m = view.positions();
    let horizon = inst.route_window();
    // Built from the end depot backwards, then reversed per position.
    let mut fronts: Vec<Vec<ForwardLabel>> = vec![Vec::new(); m];
    fronts[m - 1].push(ForwardLabel { ls: horizon.upper, fs: horizon.upper - horizon.lower, et: horizon.upper });
    let mut cand: Vec<ForwardLabel> = Vec::new();
    for pos in (0..m - 1).rev() {
        let node = view.node(pos);
        let travel = inst.travel(node, view.node(pos + 1));
        let service = inst.service(node);
        let (windows, _) = view.windows(pos);
        cand.clear();
        for label in &fronts[pos + 1] {
            for w in windows {
                if let Some(next) = expand_forward(label, w, travel, service) {
                    cand.push(next);
                }
            }
        }
        cand.sort_by(|a, b| b.ls.total_cmp(&a.ls).then_with(|| (a.et - a.fs).total_cmp(&(b.et - b.fs))));
        let mut reach = f64::INFINITY;
        let out = &mut fronts[pos];
        for &label in &cand {
            let r = label.et - label.fs;
            if !prune || r < reach {
                reach = reach.min(r);
                out.push(label);
            }
        }
    }
    state.fwd.clear();
    state.fwd_off.clear();
    state.fwd_off.push(0);
    for front in fronts {
        state.fwd.extend(front);
        state.fwd_off.push(state.fwd.len());
    }
}

/// Minimal duration of a route and one schedule attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteTiming {
    pub duration: f64,
    pub schedule: RouteSchedule,
}

/// Minimal route duration over all window assignments and start times.
/// `None` when the route cannot be timed.
pub fn min_route_duration(view: &RouteView) -> Option<RouteTiming> {
    let mut state = RouteEvalState::default();
    build_backward(view, true, &mut state);
    timing_from_state(view, &state)
}

pub(crate) fn timing_from_state(view: &RouteView, state: &RouteEvalState) -> Option<RouteTiming> {
    let m = view.positions();
    let end = state.backward(m - 1);
    let (best, label) =
        end.iter().enumerate().min_by(|a, b| (a.1.es - a.1.st).total_cmp(&(b.1.es - b.1.st)).then(Ordering::Equal))?;

    // Walk parents back to recover one window per visit.
    let mut windows = vec![0usize; m];
    let mut idx = state.back_off[m - 1] + best;
    for pos in (1..m).rev() {
        let parent = state.back_parent[idx];
        windows[pos] = parent.window as usize;
        idx = state.back_off[pos - 1] + parent.label as usize;
    }

    let inst = view.instance;
    let start = label.st;
    let mut t = start;
    let mut stops = Vec::with_capacity(view.visits.len());
    for pos in 1..m - 1 {
        let prev = view.node(pos - 1);
        let v = view.node(pos);
        let w = inst.windows(v)[windows[pos]];
        t = (t + inst.service(prev) + inst.travel(prev, v)).max(w.lower);
        stops.push(ScheduledStop { visit: v, window: windows[pos], service_start: t });
    }
    Some(RouteTiming { duration: label.es - label.st, schedule: RouteSchedule { start, stops } })
}

/// Best insertion of one visit at one position under time minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelInsertion {
    /// Window of the inserted visit used by the best timing.
    pub window: usize,
    pub new_duration: f64,
    pub duration_delta: f64,
    /// Arc-cost change.
    pub distance_delta: f64,
    /// Travel-time change.
    pub travel_delta: f64,
}

impl LabelInsertion {
    /// Duration change plus arc-cost change.
    #[inline]
    pub fn delta(&self) -> f64 {
        self.duration_delta + self.distance_delta
    }

    /// Change of arc cost plus service-and-waiting time. Route duration is
    /// travel + service + waiting, so the travel part is taken out again.
    #[inline]
    pub fn objective_delta(&self) -> f64 {
        self.distance_delta + self.duration_delta - self.travel_delta
    }
}

/// Cheapest insertion of visit `o` after position `i`, over every
/// combination of a backward label at `i`, a forward label at `i + 1` and a
/// window of `o`.
///
/// Labels are visited in sorted order so that once the earliest arrival at
/// `o` exceeds the latest start that keeps the suffix timely, the rest of
/// the (inner or outer) front can be skipped. For a compatible pair the
/// inserted visit's labels are formed by expansion and the new duration is
/// `et_o - st_o - min(ls_o - es_o, bs_o + fs_o)`: both partial paths slide
/// towards each other by their own (expanded) slack, bounded by the room
/// left inside `o`'s window.
pub fn cheapest_insertion_b1(
    view: &RouteView,
    state: &RouteEvalState,
    i: usize,
    o: usize,
    old_duration: f64,
) -> Option<LabelInsertion> {
    let inst = view.instance;
    let (a, b) = (view.node(i), view.node(i + 1));
    let (t_ao, t_ob) = (inst.travel(a, o), inst.travel(o, b));
    let (s_a, s_o) = (inst.service(a), inst.service(o));
    let windows = inst.windows(o);
    let back = state.backward(i);
    let fwd = state.forward(i + 1);
    let first = fwd.first()?;

    let mut best = f64::INFINITY;
    let mut best_window = 0;
    for bl in back {
        let arrival = bl.es + s_a + t_ao;
        if arrival > first.ls - t_ob - s_o {
            break;
        }
        for fl in fwd {
            let latest = fl.ls - t_ob - s_o;
            if arrival > latest {
                break;
            }
            for (p, w) in windows.iter().enumerate() {
                if w.upper < arrival {
                    continue;
                }
                if w.lower > latest {
                    break;
                }
                let (Some(bo), Some(fo)) = (expand_backward(bl, w, t_ao, s_a), expand_forward(fl, w, t_ob, s_o)) else {
                    continue;
                };
                if bo.es <= fo.ls {
                    let dur = fo.et - bo.st - (fo.ls - bo.es).min(bo.bs + fo.fs);
                    if dur < best {
                        best = dur;
                        best_window = p;
                    }
                }
            }
        }
    }
    if !best.is_finite() {
        return None;
    }
    Some(LabelInsertion {
        window: best_window,
        new_duration: best,
        duration_delta: best - old_duration,
        distance_delta: inst.cost(a, o) + inst.cost(o, b) - inst.cost(a, b),
        travel_delta: t_ao + t_ob - inst.travel(a, b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Instance, Precision, Visit};

    fn wide() -> TimeWindow {
        TimeWindow::new(0.0, 1e9)
    }

    #[test]
    fn wide_window_passes_label_through() {
        let l = BackwardLabel { es: 3.0, bs: 7.0, st: 1.0 };
        let e = expand_backward(&l, &wide(), 2.0, 1.0).unwrap();
        assert_eq!(e, BackwardLabel { es: 6.0, bs: 7.0, st: 1.0 });
        let f = ForwardLabel { ls: 50.0, fs: 9.0, et: 60.0 };
        let e = expand_forward(&f, &wide(), 2.0, 1.0).unwrap();
        assert_eq!(e, ForwardLabel { ls: 47.0, fs: 9.0, et: 60.0 });
    }

    #[test]
    fn depot_base_into_late_window() {
        // Start base (0, D, 0) with D = 100, t + s = 4, window [10, 20].
        let base = BackwardLabel { es: 0.0, bs: 100.0, st: 0.0 };
        let e = expand_backward(&base, &TimeWindow::new(10.0, 20.0), 4.0, 0.0).unwrap();
        assert_eq!(e.es, 10.0);
        // Departing at 6 arrives exactly at 10, and the path may slide to the
        // window's end without further waiting.
        assert_eq!(e.st, 6.0);
        assert_eq!(e.bs, 10.0);
        assert!(expand_backward(&base, &TimeWindow::new(0.0, 3.0), 4.0, 0.0).is_none());
    }

    #[test]
    fn forward_pinned_by_window_has_no_slack() {
        // A suffix whose latest start is cut by a window upper bound by more
        // than its slack keeps no forward slack.
        let l = ForwardLabel { ls: 100.0, fs: 5.0, et: 120.0 };
        let e = expand_forward(&l, &TimeWindow::new(70.0, 80.0), 8.0, 2.0).unwrap();
        assert_eq!(e.ls, 80.0);
        assert_eq!(e.fs, 0.0);
        assert_eq!(e.et, 115.0);
        assert!(expand_forward(&l, &TimeWindow::new(95.0, 99.0), 8.0, 2.0).is_none());
    }

    #[test]
    fn dominance_predicates() {
        let a = BackwardLabel { es: 5.0, bs: 2.0, st: 0.0 };
        let b = BackwardLabel { es: 6.0, bs: 1.0, st: 0.0 };
        assert!(dominates_backward(&a, &b));
        assert!(!dominates_backward(&b, &a));
        assert!(dominates_backward(&a, &a));
        let f = ForwardLabel { ls: 9.0, fs: 1.0, et: 10.0 };
        let g = ForwardLabel { ls: 8.0, fs: 1.0, et: 11.0 };
        assert!(dominates_forward(&f, &g) && !dominates_forward(&g, &f) && dominates_forward(&f, &f));
    }

    fn single(window: TimeWindow, t: f64, s: f64) -> Instance {
        let depot = Visit { id: 0, x: 0.0, y: 0.0, demand: 0.0, service_time: 0.0, windows: vec![TimeWindow::new(0.0, 100.0)] };
        let v = Visit { id: 1, x: t, y: 0.0, demand: 1.0, service_time: s, windows: vec![window] };
        Instance::new("single", vec![depot, v], 10.0, Precision::Exact)
    }

    #[test]
    fn start_shifts_to_avoid_waiting() {
        let inst = single(TimeWindow::new(10.0, 12.0), 2.0, 1.0);
        let timing = min_route_duration(&RouteView::new(&inst, &[1])).unwrap();
        assert_eq!(timing.duration, 5.0);
        assert_eq!(timing.schedule.start, 8.0);
        assert_eq!(timing.schedule.stops[0].service_start, 10.0);
    }

    #[test]
    fn insertion_into_empty_route() {
        let inst = single(TimeWindow::new(10.0, 12.0), 2.0, 1.0);
        let empty = RouteView::new(&inst, &[]);
        let state = build_labels(&empty, true);
        assert_eq!(state.duration(), Some(0.0));
        let ins = cheapest_insertion_b1(&empty, &state, 0, 1, 0.0).unwrap();
        assert_eq!(ins.new_duration, 5.0);
        assert_eq!(ins.delta(), 4.0 + 5.0);
        assert_eq!(ins.objective_delta(), 4.0 + 1.0);
    }

    #[test]
    fn single_window_route_has_one_label_per_position() {
        let inst = single(TimeWindow::new(10.0, 12.0), 2.0, 1.0);
        let state = build_labels(&RouteView::new(&inst, &[1]), true);
        for p in 0..3 {
            assert_eq!(state.backward(p).len(), 1);
            assert_eq!(state.forward(p).len(), 1);
        }
        assert!(state.is_feasible());
    }

    #[test]
    fn upper_bound_caps_slack() {
        // Window [0,0] right at the depot, then [100,200]: the route cannot
        // start after 0, so the second visit waits.
        let depot = Visit { id: 0, x: 0.0, y: 0.0, demand: 0.0, service_time: 0.0, windows: vec![TimeWindow::new(0.0, 500.0)] };
        let v1 = Visit { id: 1, x: 0.0, y: 0.0, demand: 1.0, service_time: 0.0, windows: vec![TimeWindow::new(0.0, 0.0)] };
        let v2 = Visit { id: 2, x: 0.0, y: 0.0, demand: 1.0, service_time: 0.0, windows: vec![TimeWindow::new(100.0, 200.0)] };
        let inst = Instance::new("cap", vec![depot, v1, v2], 10.0, Precision::Exact);
        let timing = min_route_duration(&RouteView::new(&inst, &[1, 2])).unwrap();
        assert_eq!(timing.duration, 100.0);
        assert_eq!(timing.schedule.start, 0.0);
    }
}
