use crate::model::{Instance, RouteSchedule};
use crate::schedule::{
    build_labels, cheapest_insertion_b1, delta_distance, first_feasible_window_b0, update_slacks, RouteEvalState,
    RouteView, SlackState,
};

/// How routes are evaluated during a search.
#[derive(Debug, Clone, Copy)]
pub struct EvalMode<'a> {
    pub instance: &'a Instance,
    pub minimise_time: bool,
    /// Pin every visit to the window chosen when it was inserted.
    pub fixed_windows: bool,
}

#[derive(Debug, Clone)]
enum Eval {
    Slack(SlackState),
    Labels(RouteEvalState),
}

/// Best way to put one visit into one route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    /// Insert after this position (0 = start depot).
    pub position: usize,
    pub window: usize,
    /// Change of the route's arc cost plus time term.
    pub delta: f64,
}

/// A visit sequence with its cached evaluation state.
#[derive(Debug, Clone)]
pub struct Route {
    pub visits: Vec<usize>,
    /// Window per visit; binding only with fixed windows.
    pub pins: Vec<usize>,
    pub load: f64,
    pub distance: f64,
    pub travel: f64,
    /// Minimal duration; zero when time is not minimised.
    pub duration: f64,
    pub feasible: bool,
    /// Unique per visit sequence within one search; keys the insertion cache.
    pub version: u64,
    eval: Eval,
}

impl Route {
    pub fn build(mode: &EvalMode, visits: Vec<usize>, pins: Vec<usize>, version: u64) -> Route {
        debug_assert_eq!(visits.len(), pins.len());
        let inst = mode.instance;
        let load = visits.iter().map(|&v| inst.demand(v)).sum();
        let view = view_of(mode, &visits, &pins);
        let (distance, travel) = (view.distance(), view.travel_sum());
        let (eval, feasible, duration) = if mode.minimise_time {
            let state = build_labels(&view, true);
            match state.duration() {
                Some(d) if state.is_feasible() => (Eval::Labels(state), true, d),
                _ => (Eval::Labels(state), false, 0.0),
            }
        } else {
            let state = update_slacks(&view);
            let f = state.feasible;
            (Eval::Slack(state), f, 0.0)
        };
        Route { visits, pins, load, distance, travel, duration, feasible: feasible && load <= inst.vehicle_capacity, version, eval }
    }

    pub fn view<'a>(&'a self, mode: &EvalMode<'a>) -> RouteView<'a> {
        view_of(mode, &self.visits, &self.pins)
    }

    /// Service plus waiting time (zero when time is not minimised).
    pub fn time_term(&self) -> f64 {
        if matches!(self.eval, Eval::Labels(_)) {
            self.duration - self.travel
        } else {
            0.0
        }
    }

    /// Arc cost plus time term.
    pub fn cost(&self) -> f64 {
        self.distance + self.time_term()
    }

    /// Cheapest insertion of `v`, earliest position on ties.
    pub fn best_insertion(&self, mode: &EvalMode, v: usize) -> Option<Insertion> {
        let inst = mode.instance;
        if self.load + inst.demand(v) > inst.vehicle_capacity {
            return None;
        }
        let view = self.view(mode);
        let mut best: Option<Insertion> = None;
        for pos in 0..=self.visits.len() {
            let found = match &self.eval {
                Eval::Slack(s) => first_feasible_window_b0(&view, s, pos, v)
                    .map(|window| Insertion { position: pos, window, delta: delta_distance(&view, pos, v) }),
                Eval::Labels(l) => cheapest_insertion_b1(&view, l, pos, v, self.duration)
                    .map(|ins| Insertion { position: pos, window: ins.window, delta: ins.objective_delta() }),
            };
            if let Some(f) = found {
                if best.is_none_or(|b| f.delta < b.delta) {
                    best = Some(f);
                }
            }
        }
        best
    }

    /// Planned service start per visit: earliest starts without time
    /// minimisation, the optimal timing otherwise.
    pub fn start_times(&self, mode: &EvalMode) -> Vec<f64> {
        match &self.eval {
            Eval::Slack(s) => s.es[1..=self.visits.len()].to_vec(),
            Eval::Labels(_) => self.schedule(mode).stops.iter().map(|s| s.service_start).collect(),
        }
    }

    /// Schedule for output. Requires a feasible route.
    pub fn schedule(&self, mode: &EvalMode) -> RouteSchedule {
        let view = self.view(mode);
        match &self.eval {
            Eval::Slack(s) => s.earliest_schedule(&view),
            Eval::Labels(l) => crate::schedule::timing_from_state(&view, l).expect("feasible route").schedule,
        }
    }

    /// Index of the first visit that cannot be served in time, if any.
    pub fn first_late_visit(&self) -> Option<usize> {
        match &self.eval {
            Eval::Slack(s) => (1..=self.visits.len()).find(|&p| !s.es[p].is_finite()).map(|p| p - 1),
            Eval::Labels(l) => (1..=self.visits.len()).find(|&p| l.backward(p).is_empty()).map(|p| p - 1),
        }
    }
}

fn view_of<'a>(mode: &EvalMode<'a>, visits: &'a [usize], pins: &'a [usize]) -> RouteView<'a> {
    if mode.fixed_windows {
        RouteView::with_fixed_windows(mode.instance, visits, pins)
    } else {
        RouteView::new(mode.instance, visits)
    }
}
