//! Destroy operators. Each returns the visits to unassign; the caller
//! applies the removal.

use rand::seq::SliceRandom;
use rand::Rng;

use super::route::EvalMode;
use super::state::SearchState;
use crate::model::DEPOT;

/// Rank drawn by the `r^4` law: `floor(r^4 * n)` for `r ~ U[0, 1)`.
#[inline]
pub fn pick_rank(r: f64, n: usize) -> usize {
    debug_assert!(n > 0);
    ((r.powi(4) * n as f64) as usize).min(n - 1)
}

/// Best objective value seen per directed edge.
#[derive(Debug, Clone)]
pub struct EdgeHistory {
    n: usize,
    best: Vec<f64>,
}

impl EdgeHistory {
    pub fn new(n_nodes: usize) -> Self {
        EdgeHistory { n: n_nodes, best: vec![f64::INFINITY; n_nodes * n_nodes] }
    }

    /// Best cost of a solution containing edge `(i, j)`; `+inf` if unseen.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.best[i * self.n + j]
    }

    pub fn record_edge(&mut self, i: usize, j: usize, cost: f64) {
        let e = &mut self.best[i * self.n + j];
        if cost < *e {
            *e = cost;
        }
    }

    /// Records every edge of `state` (depot legs included) at `cost`.
    pub fn record(&mut self, state: &SearchState, cost: f64) {
        for route in &state.routes {
            let mut prev = DEPOT;
            for &v in route.visits.iter().chain(std::iter::once(&DEPOT)) {
                self.record_edge(prev, v, cost);
                prev = v;
            }
        }
    }

    /// Sum of the two edges around position `k` of `route`.
    pub fn score(&self, route: &[usize], k: usize) -> f64 {
        let pre = if k == 0 { DEPOT } else { route[k - 1] };
        let suc = route.get(k + 1).copied().unwrap_or(DEPOT);
        self.get(pre, route[k]) + self.get(route[k], suc)
    }
}

/// Removal count in `[min(lo, assigned), min(hi, assigned)]`.
pub fn removal_count(range: (usize, usize), assigned: usize, rng: &mut impl Rng) -> usize {
    let (lo, hi) = (range.0.min(assigned), range.1.min(assigned));
    rng.gen_range(lo..=hi)
}

/// `q` distinct assigned visits chosen uniformly.
pub fn destroy_random(state: &SearchState, q: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut visits = state.assigned_visits();
    let q = q.min(visits.len());
    let (chosen, _) = visits.partial_shuffle(rng, q);
    chosen.to_vec()
}

/// Picks random assigned visits and removes each with its `y` route
/// successors until at least `q` are removed.
pub fn destroy_cluster(state: &SearchState, q: usize, y: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut pool = state.assigned_visits();
    let q = q.min(pool.len());
    let loc = state.locate(pool.iter().max().map_or(1, |m| m + 1));
    let mut removed = Vec::with_capacity(q + y);
    let mut gone = vec![false; loc.len()];
    while removed.len() < q {
        let k = rng.gen_range(0..pool.len());
        let seed = pool.swap_remove(k);
        if gone[seed] {
            continue;
        }
        let (r, idx) = loc[seed].expect("assigned");
        for &v in state.routes[r].visits[idx..].iter().take(y + 1) {
            if !gone[v] {
                gone[v] = true;
                removed.push(v);
            }
        }
    }
    removed
}

/// Repeatedly picks a random removed visit as anchor and removes the
/// remaining visit at rank `r^4 * n` when sorted by `key(anchor, v)`.
fn related_removal(
    state: &SearchState,
    q: usize,
    rng: &mut impl Rng,
    key: impl Fn(usize, usize) -> f64,
) -> Vec<usize> {
    let mut remaining = state.assigned_visits();
    let q = q.min(remaining.len());
    if q == 0 {
        return Vec::new();
    }
    // `remaining` stays in route order, so the stable sort below breaks key
    // ties by route order.
    let first = remaining.remove(rng.gen_range(0..remaining.len()));
    let mut removed = vec![first];
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(remaining.len());
    while removed.len() < q {
        let anchor = removed[rng.gen_range(0..removed.len())];
        keyed.clear();
        keyed.extend(remaining.iter().map(|&v| (key(anchor, v), v)));
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let pick = keyed[pick_rank(rng.gen::<f64>(), keyed.len())].1;
        remaining.retain(|&v| v != pick);
        removed.push(pick);
    }
    removed
}

/// Related removal by travel distance to the anchor.
pub fn destroy_geometric(state: &SearchState, mode: &EvalMode, q: usize, rng: &mut impl Rng) -> Vec<usize> {
    let inst = mode.instance;
    related_removal(state, q, rng, |a, v| inst.travel(a, v))
}

/// Related removal by difference of planned service start.
pub fn destroy_time(state: &SearchState, mode: &EvalMode, q: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut start = vec![0.0; mode.instance.n_nodes()];
    for route in &state.routes {
        for (&v, t) in route.visits.iter().zip(route.start_times(mode)) {
            start[v] = t;
        }
    }
    related_removal(state, q, rng, |a, v| (start[v] - start[a]).abs())
}

/// Scores each visit by the history of its two edges, highest first, and
/// removes at rank `r^4 * n` of the remaining list. Unseen edges score
/// `+inf`, so their visits go first.
pub fn destroy_history(state: &SearchState, q: usize, history: &EdgeHistory, rng: &mut impl Rng) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = state
        .routes
        .iter()
        .flat_map(|r| (0..r.visits.len()).map(move |k| (history.score(&r.visits, k), r.visits[k])))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let q = q.min(scored.len());
    let mut removed = Vec::with_capacity(q);
    while removed.len() < q {
        let k = pick_rank(rng.gen::<f64>(), scored.len());
        removed.push(scored.remove(k).1);
    }
    removed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alns::route::Route;
    use crate::alns::state::Versions;
    use crate::model::{Instance, Precision, TimeWindow, Visit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(n: usize) -> Instance {
        let mut nodes = vec![Visit { id: 0, x: 0.0, y: 0.0, demand: 0.0, service_time: 0.0, windows: vec![TimeWindow::new(0.0, 1e6)] }];
        for id in 1..=n {
            nodes.push(Visit { id, x: id as f64, y: 0.0, demand: 1.0, service_time: 0.0, windows: vec![TimeWindow::new(0.0, 1e6)] });
        }
        Instance::new("line", nodes, 1e9, Precision::Exact)
    }

    fn state(mode: &EvalMode, routes: &[&[usize]]) -> SearchState {
        let mut ver = Versions::default();
        SearchState {
            routes: routes.iter().map(|r| Route::build(mode, r.to_vec(), vec![0; r.len()], ver.fresh())).collect(),
            unassigned: Vec::new(),
        }
    }

    #[test]
    fn rank_law_bounds() {
        assert_eq!(pick_rank(0.0, 10), 0);
        assert_eq!(pick_rank(0.999_999, 10), 9);
        assert_eq!(pick_rank(0.5, 16), 1);
    }

    #[test]
    fn random_removal_sizes() {
        let inst = line(12);
        let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
        let s = state(&mode, &[&[1, 2, 3, 4, 5, 6], &[7, 8, 9, 10, 11, 12]]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(destroy_random(&s, 0, &mut rng).is_empty());
        let mut all = destroy_random(&s, 50, &mut rng);
        all.sort();
        assert_eq!(all, (1..=12).collect::<Vec<_>>());
    }

    #[test]
    fn cluster_takes_successors_and_truncates() {
        let inst = line(6);
        let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
        let s = state(&mode, &[&[1, 2, 3], &[4, 5, 6]]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let r = destroy_cluster(&s, 1, 1, &mut rng);
            match r[0] {
                3 | 6 => assert_eq!(r.len(), 1),
                v => assert_eq!(r, vec![v, v + 1]),
            }
        }
        // Exhaustive size bound on every seed and q.
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for q in 1..=6 {
                for y in [1, 2, 4] {
                    let r = destroy_cluster(&s, q, y, &mut rng);
                    assert!(r.len() >= q && r.len() <= (q + y).min(6), "q={q} y={y} got {r:?}");
                    let mut d = r.clone();
                    d.sort();
                    d.dedup();
                    assert_eq!(d.len(), r.len());
                }
            }
        }
    }

    #[test]
    fn geometric_with_zero_draw_takes_nearest() {
        let inst = line(8);
        let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
        let s = state(&mode, &[&[1, 2, 3, 4, 5, 6, 7, 8]]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let r = destroy_geometric(&s, &mode, 2, &mut rng);
            assert_eq!(r.len(), 2);
            // r^4 puts most mass on the nearest neighbours.
            assert!(r[0].abs_diff(r[1]) <= 7);
        }
    }

    #[test]
    fn time_removal_with_single_candidate() {
        let inst = line(2);
        let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
        let s = state(&mode, &[&[1, 2]]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut r = destroy_time(&s, &mode, 2, &mut rng);
        r.sort();
        assert_eq!(r, vec![1, 2]);
    }

    #[test]
    fn history_scores_sum_both_edges() {
        let mut h = EdgeHistory::new(4);
        h.record_edge(1, 2, 5000.0);
        h.record_edge(2, 3, 4500.0);
        assert_eq!(h.score(&[1, 2, 3], 1), 9500.0);
        assert_eq!(h.score(&[1, 2, 3], 0), f64::INFINITY);
        // Entries only decrease.
        h.record_edge(1, 2, 6000.0);
        assert_eq!(h.get(1, 2), 5000.0);
        h.record_edge(1, 2, 4000.0);
        assert_eq!(h.get(1, 2), 4000.0);
    }

    #[test]
    fn history_removes_unseen_edges_first() {
        let inst = line(4);
        let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
        let s = state(&mode, &[&[1, 2], &[3, 4]]);
        let mut h = EdgeHistory::new(5);
        h.record(&state(&mode, &[&[1, 2]]), 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut r = destroy_history(&s, 2, &h, &mut rng);
        r.sort();
        assert_eq!(r, vec![3, 4]);
    }
}
