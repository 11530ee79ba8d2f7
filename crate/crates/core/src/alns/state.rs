use super::route::{EvalMode, Insertion, Route};
use crate::model::{evaluate_objective, Instance, Solution};

/// Hands out route versions.
#[derive(Debug, Default)]
pub struct Versions(u64);

impl Versions {
    pub fn fresh(&mut self) -> u64 {
        self.0 += 1;
        self.0
    }
}

/// A search solution: non-empty routes plus the unassigned visits (sorted).
#[derive(Debug, Clone, Default)]
pub struct SearchState {
    pub routes: Vec<Route>,
    pub unassigned: Vec<usize>,
}

impl SearchState {
    /// All visits unassigned.
    pub fn empty(instance: &Instance) -> Self {
        SearchState { routes: Vec::new(), unassigned: instance.visit_ids().collect() }
    }

    pub fn assigned(&self) -> usize {
        self.routes.iter().map(|r| r.visits.len()).sum()
    }

    /// `(route, index)` per node; `None` for the depot and unassigned visits.
    pub fn locate(&self, n_nodes: usize) -> Vec<Option<(usize, usize)>> {
        let mut loc = vec![None; n_nodes];
        for (r, route) in self.routes.iter().enumerate() {
            for (k, &v) in route.visits.iter().enumerate() {
                loc[v] = Some((r, k));
            }
        }
        loc
    }

    /// Visits in route order.
    pub fn assigned_visits(&self) -> Vec<usize> {
        self.routes.iter().flat_map(|r| r.visits.iter().copied()).collect()
    }

    /// Arc cost plus time term over all routes.
    pub fn route_cost(&self) -> f64 {
        self.routes.iter().map(Route::cost).sum()
    }

    /// Objective value ignoring unassigned visits.
    pub fn original_cost(&self, instance: &Instance) -> f64 {
        self.route_cost() + instance.vehicle_cost * self.routes.len() as f64
    }

    /// Inserts `v` into route `r` (or a new route when `r == routes.len()`).
    pub fn insert(&mut self, mode: &EvalMode, versions: &mut Versions, r: usize, v: usize, ins: Insertion) {
        if r == self.routes.len() {
            self.routes.push(Route::build(mode, vec![v], vec![ins.window], versions.fresh()));
        } else {
            let old = &self.routes[r];
            let mut visits = old.visits.clone();
            let mut pins = old.pins.clone();
            visits.insert(ins.position, v);
            pins.insert(ins.position, ins.window);
            self.routes[r] = Route::build(mode, visits, pins, versions.fresh());
        }
        debug_assert!(self.routes[r].feasible, "insertion produced an infeasible route");
        if let Ok(k) = self.unassigned.binary_search(&v) {
            self.unassigned.remove(k);
        }
    }

    /// Unassigns `removed`, rebuilding touched routes and dropping empty ones.
    ///
    /// Removing a visit can in principle break a route when travel times
    /// violate the triangle inequality; such routes shed late visits until
    /// they are feasible again.
    pub fn remove(&mut self, mode: &EvalMode, versions: &mut Versions, removed: &[usize]) {
        if removed.is_empty() {
            return;
        }
        let mut gone = vec![false; mode.instance.n_nodes()];
        for &v in removed {
            gone[v] = true;
        }
        let mut out: Vec<usize> = removed.to_vec();
        let mut routes = Vec::with_capacity(self.routes.len());
        for route in self.routes.drain(..) {
            if !route.visits.iter().any(|&v| gone[v]) {
                routes.push(route);
                continue;
            }
            let (visits, pins): (Vec<usize>, Vec<usize>) =
                route.visits.iter().zip(&route.pins).filter(|(&v, _)| !gone[v]).map(|(&v, &p)| (v, p)).unzip();
            let mut rebuilt = Route::build(mode, visits, pins, versions.fresh());
            while !rebuilt.feasible && !rebuilt.visits.is_empty() {
                let k = rebuilt.first_late_visit().unwrap_or(rebuilt.visits.len() - 1);
                let mut visits = rebuilt.visits;
                let mut pins = rebuilt.pins;
                out.push(visits.remove(k));
                pins.remove(k);
                rebuilt = Route::build(mode, visits, pins, versions.fresh());
            }
            if !rebuilt.visits.is_empty() {
                routes.push(rebuilt);
            }
        }
        self.routes = routes;
        self.unassigned.extend(out);
        self.unassigned.sort_unstable();
        self.unassigned.dedup();
    }

    /// Converts into a model solution with schedules and cost breakdown.
    pub fn to_solution(&self, mode: &EvalMode) -> Solution {
        let inst = mode.instance;
        let mut sol = Solution {
            instance: inst.name.clone(),
            minimise_time: mode.minimise_time,
            routes: self.routes.iter().map(|r| r.visits.clone()).collect(),
            schedules: Some(self.routes.iter().map(|r| r.schedule(mode)).collect()),
            unassigned: self.unassigned.clone(),
            ..Solution::default()
        };
        sol.cost = evaluate_objective(inst, &sol).expect("schedules match routes");
        sol
    }
}
