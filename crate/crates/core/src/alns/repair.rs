//! Regret insertion, greedy construction and the per-route insertion cache.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::route::{EvalMode, Insertion, Route};
use super::state::{SearchState, Versions};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Unknown,
    Infeasible,
    Known(Insertion),
}

/// Lazily computed best insertion of each visit into each route.
///
/// Entries are keyed by route version, so inserting into (or removing from) a
/// route invalidates exactly that route's column and leaves every other
/// route's entries valid.
#[derive(Debug, Default)]
pub struct InsertionCache {
    columns: HashMap<u64, Vec<Slot>>,
    pub hits: u64,
    pub misses: u64,
    /// Recompute every hit and panic if it differs from the cached value.
    pub verify: bool,
}

impl InsertionCache {
    pub fn new(verify: bool) -> Self {
        InsertionCache { verify, ..Default::default() }
    }

    pub fn get(&mut self, mode: &EvalMode, route: &Route, v: usize) -> Option<Insertion> {
        let n = mode.instance.n_nodes();
        let column = self.columns.entry(route.version).or_insert_with(|| vec![Slot::Unknown; n]);
        match column[v] {
            Slot::Unknown => {
                self.misses += 1;
                let found = route.best_insertion(mode, v);
                column[v] = found.map_or(Slot::Infeasible, Slot::Known);
                found
            }
            slot => {
                self.hits += 1;
                let cached = match slot {
                    Slot::Known(i) => Some(i),
                    _ => None,
                };
                if self.verify {
                    assert_eq!(cached, route.best_insertion(mode, v), "stale cache entry for visit {v}");
                }
                cached
            }
        }
    }

    /// Drops the column of one route version.
    pub fn invalidate(&mut self, version: u64) {
        self.columns.remove(&version);
    }

    /// Drops every column not belonging to a live route.
    pub fn retain_live<'a>(&mut self, states: impl IntoIterator<Item = &'a SearchState>) {
        let live: HashSet<u64> = states.into_iter().flat_map(|s| s.routes.iter().map(|r| r.version)).collect();
        self.columns.retain(|k, _| live.contains(k));
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Cost of serving each visit alone in a new route (arc cost plus time
/// term, no vehicle cost); `None` when a singleton route is infeasible.
pub fn singleton_costs(mode: &EvalMode) -> Vec<Option<Insertion>> {
    let empty = Route::build(mode, Vec::new(), Vec::new(), 0);
    (0..mode.instance.n_nodes()).map(|v| if v == 0 { None } else { empty.best_insertion(mode, v) }).collect()
}

/// Repair settings shared by both regret variants.
pub struct RepairContext<'m, 'a> {
    pub mode: &'m EvalMode<'a>,
    /// Singleton costs; new routes may be opened when present.
    pub new_route: Option<&'m [Option<Insertion>]>,
    /// Added to the cost of opening a route.
    pub route_cost: f64,
}

/// Regret-2 insertion: repeatedly inserts the unassigned visit whose
/// second-best route is most expensive (a single feasible route counts as
/// infinitely expensive) into its best route. With `noise > 0`, each route
/// cost is scaled by an independent factor in `[1, 1 + noise]` for ranking
/// only. Visits that fit nowhere stay unassigned.
pub fn repair_regret2(
    ctx: &RepairContext,
    state: &mut SearchState,
    cache: &mut InsertionCache,
    versions: &mut Versions,
    noise: f64,
    rng: &mut impl Rng,
) {
    let mode = ctx.mode;
    loop {
        // (second, best, visit, route, insertion)
        let mut choice: Option<(f64, f64, usize, usize, Insertion)> = None;
        for &v in &state.unassigned {
            let mut b1 = (f64::INFINITY, usize::MAX, None);
            let mut b2 = f64::INFINITY;
            let mut consider = |cost: f64, r: usize, ins: Insertion| {
                let c = if noise > 0.0 { cost * rng.gen_range(1.0..=1.0 + noise) } else { cost };
                if c < b1.0 {
                    b2 = b1.0;
                    b1 = (c, r, Some(ins));
                } else if c < b2 {
                    b2 = c;
                }
            };
            for (r, route) in state.routes.iter().enumerate() {
                if let Some(ins) = cache.get(mode, route, v) {
                    consider(ins.delta, r, ins);
                }
            }
            if let Some(single) = ctx.new_route.and_then(|s| s[v]) {
                consider(single.delta + ctx.route_cost, state.routes.len(), single);
            }
            let (best, r, Some(ins)) = b1 else { continue };
            let better = match choice {
                None => true,
                Some((s, b, ..)) => b2 > s || (b2 == s && best > b),
            };
            if better {
                choice = Some((b2, best, v, r, ins));
            }
        }
        let Some((_, _, v, r, ins)) = choice else { break };
        state.insert(mode, versions, r, v, ins);
    }
}

/// Builds a solution by visiting customers in random order and putting each
/// one at its cheapest position in the first route (in route order) that can
/// take it, opening a new route when none can.
pub fn greedy_construct(mode: &EvalMode, versions: &mut Versions, rng: &mut impl Rng) -> SearchState {
    let singles = singleton_costs(mode);
    let mut order: Vec<usize> = mode.instance.visit_ids().collect();
    order.shuffle(rng);
    let mut state = SearchState::empty(mode.instance);
    for v in order {
        let found = state.routes.iter().enumerate().find_map(|(r, route)| route.best_insertion(mode, v).map(|i| (r, i)));
        match found {
            Some((r, ins)) => state.insert(mode, versions, r, v, ins),
            None => {
                if let Some(ins) = singles[v] {
                    let r = state.routes.len();
                    state.insert(mode, versions, r, v, ins);
                }
            }
        }
    }
    state
}
