use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{Component, DestroyOp, RepairOp, SearchConfig, Termination};
use super::destroy::{
    destroy_cluster, destroy_geometric, destroy_history, destroy_random, destroy_time, removal_count, EdgeHistory,
};
use super::engine::{accept, outcome_score, unassigned_threshold, OperatorBank, Outcome, Temperature};
use super::repair::{greedy_construct, repair_regret2, singleton_costs, InsertionCache, RepairContext};
use super::route::{EvalMode, Insertion};
use super::state::{SearchState, Versions};
use crate::model::{validate_solution, Instance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Construction,
    Tuning,
    RouteMinimisation,
    Optimisation,
}

/// One row of the best-cost trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub elapsed_s: f64,
    pub phase: Phase,
    pub current_cost: f64,
    pub best_cost: f64,
    pub routes: usize,
    pub unassigned: usize,
    pub tau: f64,
}

/// One sample of an operator weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightRow {
    pub iteration: u64,
    pub operator: &'static str,
    pub weight: f64,
    pub uses: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorStats {
    pub name: &'static str,
    pub uses: u64,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    pub iterations: u64,
    pub tuning_iterations: u64,
    pub route_min_iterations: u64,
    pub optimisation_iterations: u64,
    pub accepted: u64,
    pub improved: u64,
    pub new_best: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub cost_init: f64,
    pub tau_start: f64,
    pub tau_end: f64,
    pub wall_time_s: f64,
    pub destroy: Vec<OperatorStats>,
    pub repair: Vec<OperatorStats>,
    pub trace: Vec<TraceRow>,
    pub weights: Vec<WeightRow>,
}

impl SearchStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.iterations == 0 {
            0.0
        } else {
            self.accepted as f64 / self.iterations as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Best solution found; every visit that can be served is routed.
    pub solution: Solution,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn is_feasible(&self) -> bool {
        self.solution.unassigned.is_empty()
    }
}

enum Clock {
    Time { start: Instant, budget: f64 },
    Iterations { start: Instant, total: u64 },
}

impl Clock {
    fn new(t: Termination) -> Self {
        let start = Instant::now();
        match t {
            Termination::Time(budget) => Clock::Time { start, budget },
            Termination::Iterations(total) => Clock::Iterations { start, total },
        }
    }

    fn fraction(&self, iter: u64) -> f64 {
        match *self {
            Clock::Time { start, budget } => (start.elapsed().as_secs_f64() / budget).min(1.0),
            Clock::Iterations { total, .. } => (iter as f64 / total as f64).min(1.0),
        }
    }

    fn done(&self, iter: u64) -> bool {
        self.fraction(iter) >= 1.0
    }

    fn elapsed(&self) -> f64 {
        match self {
            Clock::Time { start, .. } | Clock::Iterations { start, .. } => start.elapsed().as_secs_f64(),
        }
    }
}

struct Search<'a> {
    cfg: &'a SearchConfig,
    mode: EvalMode<'a>,
    rng: ChaCha8Rng,
    versions: Versions,
    cache: InsertionCache,
    history: EdgeHistory,
    destroy: OperatorBank,
    repair: OperatorBank,
    singles: Vec<Option<Insertion>>,
    clock: Clock,
    iter: u64,
    /// Visits that fit in no route at all.
    unservable: usize,
    best: SearchState,
    best_cost: f64,
    phase: Phase,
    phase_best: f64,
    tau: f64,
    stats: SearchStats,
}

impl<'a> Search<'a> {
    fn penalised(&self, s: &SearchState) -> f64 {
        s.original_cost(self.mode.instance) + self.cfg.p_u * s.unassigned.len() as f64
    }

    fn route_min_cost(&self, s: &SearchState) -> f64 {
        s.route_cost() + self.cfg.p_r * s.routes.len() as f64 + self.cfg.p_u * s.unassigned.len() as f64
    }

    fn phase_cost(&self, s: &SearchState) -> f64 {
        match self.phase {
            Phase::RouteMinimisation => self.route_min_cost(s),
            _ => self.penalised(s),
        }
    }

    fn is_complete(&self, s: &SearchState) -> bool {
        s.unassigned.len() <= self.unservable
    }

    fn offer_best(&mut self, s: &SearchState) {
        if self.is_complete(s) {
            let c = s.original_cost(self.mode.instance);
            if c < self.best_cost {
                self.best_cost = c;
                self.best = s.clone();
                self.trace(s);
            }
        }
    }

    fn trace(&mut self, current: &SearchState) {
        let row = TraceRow {
            iteration: self.iter,
            elapsed_s: self.clock.elapsed(),
            phase: self.phase,
            current_cost: self.phase_cost(current),
            best_cost: self.best_cost,
            routes: current.routes.len(),
            unassigned: current.unassigned.len(),
            tau: self.tau,
        };
        self.stats.trace.push(row);
    }

    fn sample_weights(&mut self) {
        for bank in [&self.destroy, &self.repair] {
            for k in 0..bank.names.len() {
                if bank.enabled[k] {
                    self.stats.weights.push(WeightRow {
                        iteration: self.iter,
                        operator: bank.names[k],
                        weight: bank.weights[k],
                        uses: bank.uses[k],
                    });
                }
            }
        }
    }

    /// Destroys and repairs a copy of `current`.
    fn candidate(&mut self, current: &SearchState, allow_new: bool) -> (SearchState, usize, usize) {
        let d = self.destroy.select(&mut self.rng);
        let r = self.repair.select(&mut self.rng);
        let mut cand = current.clone();
        let q = removal_count(self.cfg.removal_range, cand.assigned(), &mut self.rng);
        let removed = match DestroyOp::ALL[d] {
            DestroyOp::Random => destroy_random(&cand, q, &mut self.rng),
            DestroyOp::Cluster1 => destroy_cluster(&cand, q, 1, &mut self.rng),
            DestroyOp::Cluster2 => destroy_cluster(&cand, q, 2, &mut self.rng),
            DestroyOp::Cluster4 => destroy_cluster(&cand, q, 4, &mut self.rng),
            DestroyOp::Geometric => destroy_geometric(&cand, &self.mode, q, &mut self.rng),
            DestroyOp::Time => destroy_time(&cand, &self.mode, q, &mut self.rng),
            DestroyOp::History => destroy_history(&cand, q, &self.history, &mut self.rng),
        };
        cand.remove(&self.mode, &mut self.versions, &removed);
        let noise = match RepairOp::ALL[r] {
            RepairOp::Regret2 => 0.0,
            RepairOp::Regret2Rand => self.cfg.regret_noise,
        };
        let ctx = RepairContext {
            mode: &self.mode,
            new_route: allow_new.then_some(self.singles.as_slice()),
            route_cost: self.mode.instance.vehicle_cost,
        };
        repair_regret2(&ctx, &mut cand, &mut self.cache, &mut self.versions, noise, &mut self.rng);
        (cand, d, r)
    }

    /// One iteration: candidate generation, acceptance, bookkeeping.
    /// `worsening` decides whether a worsening candidate is accepted.
    fn iterate(&mut self, current: &mut SearchState, allow_new: bool, reject_incomplete: bool) {
        let (cand, d, r) = self.candidate(current, allow_new);
        let c_new = self.phase_cost(&cand);
        let c_cur = self.phase_cost(current);
        self.history.record(&cand, self.penalised(&cand));

        let outcome = if reject_incomplete && !self.is_complete(&cand) {
            Outcome::Rejected
        } else if c_new < self.phase_best {
            Outcome::NewBest
        } else if c_new < c_cur {
            Outcome::Improved
        } else if self.phase == Phase::Tuning {
            if c_new <= c_cur {
                Outcome::Accepted
            } else {
                Outcome::Rejected
            }
        } else {
            let scale = current.original_cost(self.mode.instance);
            if accept(c_new - c_cur, scale, self.tau, &mut self.rng) {
                Outcome::Accepted
            } else {
                Outcome::Rejected
            }
        };

        let cfg = self.cfg;
        let sc = outcome_score(outcome, cfg.score_a, cfg.score_i, cfg.score_b);
        self.destroy.update(d, sc, cfg.decay);
        self.repair.update(r, sc, cfg.decay);
        self.iter += 1;
        self.stats.iterations += 1;
        match self.phase {
            Phase::Tuning => self.stats.tuning_iterations += 1,
            Phase::RouteMinimisation => self.stats.route_min_iterations += 1,
            _ => self.stats.optimisation_iterations += 1,
        }
        if outcome != Outcome::Rejected {
            self.stats.accepted += 1;
            if outcome >= Outcome::Improved {
                self.stats.improved += 1;
            }
            if outcome == Outcome::NewBest {
                self.stats.new_best += 1;
                self.phase_best = c_new;
            }
            *current = cand;
            self.offer_best(current);
        }
        self.cache.retain_live([&*current, &self.best]);
        if cfg.trace_every > 0 && self.iter.is_multiple_of(cfg.trace_every) {
            self.trace(current);
            self.sample_weights();
        }
    }

    fn unassign_smallest_route(&mut self, current: &mut SearchState) {
        let Some(r) = (0..current.routes.len()).min_by_key(|&r| current.routes[r].visits.len()) else { return };
        let visits = current.routes[r].visits.clone();
        current.remove(&self.mode, &mut self.versions, &visits);
    }

    fn enter(&mut self, phase: Phase, current: &SearchState) {
        self.phase = phase;
        self.phase_best = self.phase_cost(current);
        self.trace(current);
    }
}

/// Runs the full search on one instance.
///
/// Step 1 builds a greedy solution. Step 2 runs improving-only iterations
/// and calibrates the temperature on the resulting cost. Step 3 removes
/// routes: routes cost `p_r`, unassigned visits `p_u`, no route may be
/// opened, and whenever every visit is routed the smallest route is emptied.
/// Step 4 anneals under the original objective and rejects candidates that
/// leave visits unassigned. The best complete solution under the original
/// objective is returned.
pub fn run(instance: &Instance, cfg: &SearchConfig) -> SearchResult {
    if let Err(e) = cfg.check() {
        panic!("invalid search configuration: {e}");
    }
    let mode = EvalMode {
        instance,
        minimise_time: instance.minimise_time,
        fixed_windows: !cfg.is_enabled(Component::ImplicitTimeWindows),
    };
    let destroy_enabled = DestroyOp::ALL.iter().map(|&op| cfg.is_enabled(Component::Destroy(op))).collect();
    let repair_enabled = RepairOp::ALL.iter().map(|&op| cfg.is_enabled(Component::Repair(op))).collect();
    let singles = singleton_costs(&mode);
    let unservable = instance.visit_ids().filter(|&v| singles[v].is_none()).count();
    let mut s = Search {
        cfg,
        mode,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        versions: Versions::default(),
        cache: InsertionCache::new(cfg.verify_cache),
        history: EdgeHistory::new(instance.n_nodes()),
        destroy: OperatorBank::new(DestroyOp::ALL.iter().map(|op| op.name()).collect(), destroy_enabled),
        repair: OperatorBank::new(RepairOp::ALL.iter().map(|op| op.name()).collect(), repair_enabled),
        singles,
        clock: Clock::new(cfg.termination),
        iter: 0,
        unservable,
        best: SearchState::default(),
        best_cost: f64::INFINITY,
        phase: Phase::Construction,
        phase_best: f64::INFINITY,
        tau: 0.0,
        stats: SearchStats::default(),
    };

    // Step 1.
    let mut current = greedy_construct(&s.mode, &mut s.versions, &mut s.rng);
    s.offer_best(&current);
    s.history.record(&current, s.penalised(&current));

    // Step 2. Tuning ends early enough to leave route minimisation time
    // before its first exit check.
    let tune_cap = cfg.route_min_fraction / 2.0;
    let tuning = cfg.is_enabled(Component::TemperatureTuning);
    if tuning {
        s.enter(Phase::Tuning, &current);
        let limit = match cfg.termination {
            Termination::Iterations(n) => cfg.n_iter_tt.min((n as f64 * tune_cap) as u64),
            Termination::Time(_) => cfg.n_iter_tt,
        };
        while s.iter < limit && s.clock.fraction(s.iter) < tune_cap {
            s.iterate(&mut current, true, false);
        }
    }
    let cost_init = current.original_cost(instance);
    let temperature = match (tuning, cfg.fixed_temperature) {
        (false, Some((tau_start, tau_end))) => Temperature { tau_start, tau_end },
        _ => Temperature::calibrated(cost_init, cfg.dcost_init, cfg.dcost_end),
    };
    s.stats.cost_init = cost_init;
    s.stats.tau_start = temperature.tau_start;
    s.stats.tau_end = temperature.tau_end;
    let t0 = s.clock.fraction(s.iter);
    let progress = |f: f64| if t0 >= 1.0 { 1.0 } else { (f - t0) / (1.0 - t0) };

    // Step 3.
    if cfg.is_enabled(Component::RouteMinimisation) && current.routes.len() > 1 && !s.clock.done(s.iter) {
        s.enter(Phase::RouteMinimisation, &current);
        s.unassign_smallest_route(&mut current);
        while !s.clock.done(s.iter) {
            s.tau = temperature.at(progress(s.clock.fraction(s.iter)));
            s.iterate(&mut current, false, false);
            let f = s.clock.fraction(s.iter);
            let missing = current.unassigned.len() - s.unservable.min(current.unassigned.len());
            if f >= cfg.route_min_fraction {
                if missing == 0 {
                    break;
                }
                if missing > unassigned_threshold(f) {
                    current = s.best.clone();
                    break;
                }
            }
            if missing == 0 {
                s.unassign_smallest_route(&mut current);
            }
        }
        if !s.is_complete(&current) {
            current = s.best.clone();
        }
    }

    // Step 4.
    s.enter(Phase::Optimisation, &current);
    while !s.clock.done(s.iter) {
        s.tau = temperature.at(progress(s.clock.fraction(s.iter)));
        s.iterate(&mut current, true, true);
    }

    s.trace(&current);
    s.sample_weights();
    s.stats.cache_hits = s.cache.hits;
    s.stats.cache_misses = s.cache.misses;
    s.stats.wall_time_s = s.clock.elapsed();
    for (bank, out) in [(&s.destroy, &mut s.stats.destroy), (&s.repair, &mut s.stats.repair)] {
        *out = (0..bank.names.len())
            .map(|k| OperatorStats { name: bank.names[k], uses: bank.uses[k], weight: bank.weights[k] })
            .collect();
    }

    let mut solution = s.best.to_solution(&s.mode);
    solution.seed = Some(cfg.seed);
    solution.wall_time = Some(s.stats.wall_time_s);
    if solution.unassigned.is_empty() {
        let violations = validate_solution(instance, &solution);
        assert!(violations.is_empty(), "search produced an invalid solution: {violations:?}");
    }
    SearchResult { solution, stats: s.stats }
}

/// Runs one search per seed concurrently over the shared instance.
pub fn run_many(instance: &Instance, cfg: &SearchConfig, seeds: &[u64]) -> Vec<SearchResult> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let mut c = cfg.clone();
                c.seed = seed;
                scope.spawn(move || run(instance, &c))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
    })
}

/// The best feasible result (fewest unassigned, then lowest cost).
pub fn best_result(results: &[SearchResult]) -> Option<&SearchResult> {
    results.iter().min_by(|a, b| {
        a.solution
            .unassigned
            .len()
            .cmp(&b.solution.unassigned.len())
            .then(a.solution.cost.total.total_cmp(&b.solution.cost.total))
    })
}
