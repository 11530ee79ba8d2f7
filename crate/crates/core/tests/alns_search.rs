mod common;

use std::collections::HashSet;

use common::{exhaustive_optimum, rng, small_instance};
use rand::Rng;
use vrpmtw::alns::{
    destroy_cluster, destroy_geometric, destroy_history, destroy_random, destroy_time, greedy_construct,
    removal_count, repair_regret2, run, singleton_costs, Component, EdgeHistory, EvalMode, InsertionCache, Preset,
    RepairContext, Route, SearchConfig, SearchState, Termination, Versions,
};
use vrpmtw::model::{synthetic_instance, validate_solution, Instance, Precision, TimeWindow, Visit};

fn cfg(iterations: u64, seed: u64) -> SearchConfig {
    SearchConfig { termination: Termination::Iterations(iterations), seed, ..SearchConfig::preset(Preset::B1) }
}

fn node(id: usize, x: f64, y: f64, demand: f64, window: (f64, f64)) -> Visit {
    Visit { id, x, y, demand, service_time: 0.0, windows: vec![TimeWindow::new(window.0, window.1)] }
}

fn check_partition(inst: &Instance, state: &SearchState) {
    let mut seen = vec![0; inst.n_nodes()];
    for r in &state.routes {
        assert!(!r.visits.is_empty());
        assert!(r.feasible);
        assert!(r.load <= inst.vehicle_capacity + 1e-9);
        for &v in &r.visits {
            seen[v] += 1;
        }
    }
    for &v in &state.unassigned {
        seen[v] += 1;
    }
    assert!(inst.visit_ids().all(|v| seen[v] == 1), "visits lost or duplicated");
}

#[test]
fn one_visit_instance_is_solved_optimally() {
    let inst = Instance::new("one", vec![node(0, 0.0, 0.0, 0.0, (0.0, 100.0)), node(1, 3.0, 4.0, 1.0, (20.0, 30.0))], 10.0, Precision::Exact);
    for b in [false, true] {
        let mut i = inst.clone();
        i.minimise_time = b;
        let res = run(&i, &cfg(50, 1));
        assert_eq!(res.solution.routes, vec![vec![1]]);
        let opt = exhaustive_optimum(&i).unwrap();
        assert!((res.solution.cost.total - opt).abs() < 1e-9);
    }
}

#[test]
fn greedy_construction_is_valid() {
    let mut r = rng(40);
    for seed in 0..100 {
        let inst = synthetic_instance(r.gen_range(5..40), r.gen_range(1..=3), seed);
        for b in [false, true] {
            let mode = EvalMode { instance: &inst, minimise_time: b, fixed_windows: false };
            let state = greedy_construct(&mode, &mut Versions::default(), &mut r);
            check_partition(&inst, &state);
            assert!(state.unassigned.is_empty());
            let mut sol = state.to_solution(&mode);
            sol.minimise_time = b;
            let mut i = inst.clone();
            i.minimise_time = b;
            assert!(validate_solution(&i, &sol).is_empty());
        }
    }
}

#[test]
fn iteration_budget_runs_are_reproducible() {
    let inst = synthetic_instance(40, 2, 3);
    let a = run(&inst, &cfg(800, 9));
    let b = run(&inst, &cfg(800, 9));
    assert_eq!(a.solution.routes, b.solution.routes);
    assert_eq!(a.solution.cost.total, b.solution.cost.total);
    let strip = |r: &vrpmtw::alns::SearchResult| {
        r.stats.trace.iter().map(|t| (t.iteration, t.phase, t.current_cost, t.best_cost, t.routes, t.unassigned, t.tau)).collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn verified_cache_run_is_consistent() {
    let inst = synthetic_instance(30, 3, 4);
    let mut c = cfg(600, 2);
    c.verify_cache = true;
    let res = run(&inst, &c);
    assert!(res.stats.cache_hits > 0);
    assert!(res.is_feasible());
    assert!(validate_solution(&inst, &res.solution).is_empty());
}

#[test]
fn best_cost_never_increases_and_final_solution_is_complete() {
    let inst = synthetic_instance(50, 3, 5);
    for b in [false, true] {
        let mut i = inst.clone();
        i.minimise_time = b;
        let mut c = cfg(1500, 3);
        c.trace_every = 10;
        let res = run(&i, &c);
        assert!(res.is_feasible());
        let best: Vec<f64> = res.stats.trace.iter().map(|t| t.best_cost).filter(|c| c.is_finite()).collect();
        assert!(best.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        assert!((best.last().unwrap() - res.solution.cost.total).abs() < 1e-6);
        assert!(validate_solution(&i, &res.solution).is_empty());
    }
}

#[test]
fn fixed_window_mode_produces_valid_solutions() {
    let inst = synthetic_instance(40, 3, 6);
    let mut c = cfg(600, 4);
    c.disabled.push(Component::ImplicitTimeWindows);
    let res = run(&inst, &c);
    assert!(res.is_feasible());
    assert!(validate_solution(&inst, &res.solution).is_empty());
}

#[test]
fn destroy_and_repair_keep_every_visit_exactly_once() {
    let inst = synthetic_instance(60, 3, 7);
    let mode = EvalMode { instance: &inst, minimise_time: true, fixed_windows: false };
    let singles = singleton_costs(&mode);
    let mut r = rng(41);
    let mut ver = Versions::default();
    let mut state = greedy_construct(&mode, &mut ver, &mut r);
    let mut cache = InsertionCache::new(true);
    let mut history = EdgeHistory::new(inst.n_nodes());
    for it in 0..300 {
        history.record(&state, state.original_cost(&inst));
        let q = removal_count((10, 40), state.assigned(), &mut r);
        let removed = match it % 5 {
            0 => destroy_random(&state, q, &mut r),
            1 => destroy_cluster(&state, q, 1 << r.gen_range(0..3), &mut r),
            2 => destroy_geometric(&state, &mode, q, &mut r),
            3 => destroy_time(&state, &mode, q, &mut r),
            _ => destroy_history(&state, q, &history, &mut r),
        };
        let distinct: HashSet<usize> = removed.iter().copied().collect();
        assert_eq!(distinct.len(), removed.len());
        assert!(removed.len() >= q);
        if it % 5 != 1 {
            assert_eq!(removed.len(), q);
        }
        state.remove(&mode, &mut ver, &removed);
        check_partition(&inst, &state);
        let ctx = RepairContext { mode: &mode, new_route: Some(&singles), route_cost: inst.vehicle_cost };
        repair_regret2(&ctx, &mut state, &mut cache, &mut ver, if it % 2 == 0 { 0.0 } else { 0.5 }, &mut r);
        check_partition(&inst, &state);
        assert!(state.unassigned.is_empty());
        cache.retain_live([&state]);
    }
}

#[test]
fn regret_serves_the_visit_with_one_option_first() {
    // Route A has room for 2, route B for 1. Visit 2 (demand 2) only fits A;
    // visit 3 (demand 1) is cheaper in A but also fits B.
    let nodes = vec![
        node(0, 0.0, 0.0, 0.0, (0.0, 1e4)),
        node(1, 10.0, 0.0, 1.0, (0.0, 1e4)),
        node(2, 10.0, 10.0, 2.0, (0.0, 1e4)),
        node(3, 10.0, 1.0, 1.0, (0.0, 1e4)),
        node(4, 0.0, 10.0, 2.0, (0.0, 1e4)),
    ];
    let inst = Instance::new("regret", nodes, 3.0, Precision::Exact);
    let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
    let mut ver = Versions::default();
    let a = Route::build(&mode, vec![1], vec![0], ver.fresh());
    let b = Route::build(&mode, vec![4], vec![0], ver.fresh());
    assert!(a.best_insertion(&mode, 3).unwrap().delta < a.best_insertion(&mode, 2).unwrap().delta);
    let mut state = SearchState { routes: vec![a, b], unassigned: vec![2, 3] };
    let ctx = RepairContext { mode: &mode, new_route: None, route_cost: 0.0 };
    repair_regret2(&ctx, &mut state, &mut InsertionCache::new(true), &mut ver, 0.0, &mut rng(0));
    assert!(state.unassigned.is_empty());
    assert!(state.routes[0].visits.contains(&2));
    assert!(state.routes[1].visits.contains(&3));
}

fn repaired_routes(inst: &Instance, noise: f64, seed: u64) -> Vec<Vec<usize>> {
    let mode = EvalMode { instance: inst, minimise_time: true, fixed_windows: false };
    let singles = singleton_costs(&mode);
    let mut ver = Versions::default();
    let mut state = greedy_construct(&mode, &mut ver, &mut rng(5));
    let removed = destroy_random(&state, 15, &mut rng(6));
    state.remove(&mode, &mut ver, &removed);
    let ctx = RepairContext { mode: &mode, new_route: Some(&singles), route_cost: inst.vehicle_cost };
    repair_regret2(&ctx, &mut state, &mut InsertionCache::new(false), &mut ver, noise, &mut rng(seed));
    state.routes.iter().map(|r| r.visits.clone()).collect()
}

#[test]
fn noise_broadens_regret_outcomes() {
    let inst = synthetic_instance(40, 2, 8);
    let plain: HashSet<_> = (0..50).map(|s| repaired_routes(&inst, 0.0, s)).collect();
    assert_eq!(plain.len(), 1, "zero noise must not depend on the random stream");
    assert_eq!(repaired_routes(&inst, 0.5, 3), repaired_routes(&inst, 0.5, 3));
    let noisy: HashSet<_> = (0..50).map(|s| repaired_routes(&inst, 0.5, s)).collect();
    assert!(noisy.len() > 1);
}

#[test]
fn random_removal_is_uniform() {
    let inst = synthetic_instance(20, 1, 9);
    let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
    let state = greedy_construct(&mode, &mut Versions::default(), &mut rng(1));
    let mut r = rng(42);
    let draws = 100_000;
    let mut counts = vec![0.0f64; inst.n_nodes()];
    for _ in 0..draws {
        counts[destroy_random(&state, 1, &mut r)[0]] += 1.0;
    }
    let expected = draws as f64 / 20.0;
    let chi2: f64 = counts[1..].iter().map(|c| (c - expected).powi(2) / expected).sum();
    // 0.1% critical value of chi-square with 19 degrees of freedom.
    assert!(chi2 < 43.82, "chi2 = {chi2}");
}

#[test]
fn time_removal_equals_geometric_when_times_equal_distances() {
    // Visits on a line with point windows at their distance from the depot:
    // planned starts coincide with positions.
    let mut nodes = vec![node(0, 0.0, 0.0, 0.0, (0.0, 1e4))];
    let xs = [3.0, 7.0, 12.0, 20.0, 21.0, 33.0, 40.0, 52.0, 60.0, 71.0, 85.0, 99.0];
    for (k, &x) in xs.iter().enumerate() {
        nodes.push(node(k + 1, x, 0.0, 1.0, (x, x)));
    }
    let inst = Instance::new("line", nodes, 100.0, Precision::Exact);
    let mode = EvalMode { instance: &inst, minimise_time: false, fixed_windows: false };
    let mut ver = Versions::default();
    let evens: Vec<usize> = (1..=12).filter(|v| v % 2 == 0).collect();
    let odds: Vec<usize> = (1..=12).filter(|v| v % 2 == 1).collect();
    let state = SearchState {
        routes: vec![
            Route::build(&mode, evens.clone(), vec![0; evens.len()], ver.fresh()),
            Route::build(&mode, odds.clone(), vec![0; odds.len()], ver.fresh()),
        ],
        unassigned: vec![],
    };
    assert!(state.routes.iter().all(|r| r.feasible));
    for seed in 0..200 {
        let q = 1 + seed as usize % 10;
        let t = destroy_time(&state, &mode, q, &mut rng(seed));
        let g = destroy_geometric(&state, &mode, q, &mut rng(seed));
        assert_eq!(t, g, "seed {seed}");
    }
}

#[test]
fn edge_history_is_nonincreasing() {
    let mut h = EdgeHistory::new(5);
    let mut r = rng(43);
    let mut last = [f64::INFINITY; 25];
    for _ in 0..2000 {
        let (i, j) = (r.gen_range(0..5), r.gen_range(0..5));
        h.record_edge(i, j, r.gen_range(0.0..100.0));
        for a in 0..5 {
            for b in 0..5 {
                assert!(h.get(a, b) <= last[a * 5 + b]);
                last[a * 5 + b] = h.get(a, b);
            }
        }
    }
}

#[test]
fn small_instances_against_exhaustive_optimum() {
    let mut r = rng(44);
    let mut hit = 0;
    let total = 10;
    for _ in 0..total {
        let inst = small_instance(&mut r, 6, 2);
        let Some(opt) = exhaustive_optimum(&inst) else { continue };
        let res = run(&inst, &SearchConfig { removal_range: (1, 6), ..cfg(600, 1) });
        assert!(res.is_feasible());
        assert!(res.solution.cost.total >= opt - 1e-6, "below the optimum: {} < {opt}", res.solution.cost.total);
        hit += ((res.solution.cost.total - opt).abs() <= 1e-6 * (1.0 + opt)) as usize;
    }
    assert!(hit >= total - 1, "{hit}/{total} optimal");
}
