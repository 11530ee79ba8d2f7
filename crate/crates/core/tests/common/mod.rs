#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrpmtw::model::{Instance, Precision, TimeWindow, Visit, DEPOT};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance on a 100x100 square with up to `max_windows` disjoint
/// windows per visit inside `[0, horizon]`. Integer data when `integral`.
pub fn random_instance(rng: &mut impl Rng, n: usize, max_windows: usize, horizon: f64, integral: bool) -> Instance {
    let coord = |rng: &mut dyn rand::RngCore| {
        let v: f64 = rng.gen_range(0.0..100.0);
        if integral { v.round() } else { v }
    };
    let depot = Visit { id: 0, x: 50.0, y: 50.0, demand: 0.0, service_time: 0.0, windows: vec![TimeWindow::new(0.0, horizon)] };
    let mut nodes = vec![depot];
    for id in 1..=n {
        let x = coord(rng);
        let y = coord(rng);
        let service = if integral { rng.gen_range(0..=10) as f64 } else { rng.gen_range(0.0..10.0) };
        let k = rng.gen_range(1..=max_windows);
        nodes.push(Visit { id, x, y, demand: rng.gen_range(1..=10) as f64, service_time: service, windows: random_windows(rng, k, horizon, integral) });
    }
    let precision = if integral { Precision::Decimals(0) } else { Precision::Exact };
    Instance::new("rand", nodes, 1e9, precision)
}

/// `k` disjoint windows in `[0, horizon]`, sorted.
pub fn random_windows(rng: &mut impl Rng, k: usize, horizon: f64, integral: bool) -> Vec<TimeWindow> {
    let slot = horizon / k as f64;
    (0..k)
        .map(|p| {
            let base = slot * p as f64;
            let mut a = base + rng.gen_range(0.0..slot * 0.6);
            let mut b = a + rng.gen_range(0.0..slot * 0.4);
            if integral {
                a = a.ceil();
                b = b.floor().max(a);
            }
            TimeWindow::new(a, b.min(base + slot - 1e-6))
        })
        .collect()
}

/// Random route over a subset of the visits, ordered by a random window's
/// midpoint so that a good share of routes is timely.
pub fn random_route(rng: &mut impl Rng, inst: &Instance, len: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut ids: Vec<usize> = inst.visit_ids().collect();
    ids.shuffle(rng);
    ids.truncate(len);
    let mut keyed: Vec<(f64, usize)> = ids
        .into_iter()
        .map(|v| {
            let ws = inst.windows(v);
            let w = ws[rng.gen_range(0..ws.len())];
            (0.5 * (w.lower + w.upper) + rng.gen_range(-20.0..20.0), v)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, v)| v).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Small instance for exhaustive comparison: `n` visits, 1..=`max_windows`
/// reachable windows each, capacity for a handful of visits per route.
pub fn small_instance(rng: &mut impl Rng, n: usize, max_windows: usize) -> Instance {
    let horizon = 400.0;
    let depot = Visit { id: 0, x: 50.0, y: 50.0, demand: 0.0, service_time: 0.0, windows: vec![TimeWindow::new(0.0, horizon)] };
    let mut nodes = vec![depot];
    for id in 1..=n {
        let x: f64 = rng.gen_range(0.0..100.0);
        let y: f64 = rng.gen_range(0.0..100.0);
        let d = ((x - 50.0f64).powi(2) + (y - 50.0f64).powi(2)).sqrt();
        let service = 5.0;
        let (first, last) = (d.ceil(), (horizon - d - service).floor());
        let k = rng.gen_range(1..=max_windows);
        let slot = (last - first) / k as f64;
        let windows = (0..k)
            .map(|p| {
                let base = first + slot * p as f64;
                let width = rng.gen_range(20.0..60.0f64).min(slot - 2.0);
                let lower = (base + rng.gen_range(0.0..(slot - width - 1.0).max(1e-9))).round();
                TimeWindow::new(lower, (lower + width).round().min(base + slot - 1.0))
            })
            .collect();
        nodes.push(Visit { id, x, y, demand: rng.gen_range(1..=10) as f64, service_time: service, windows });
    }
    Instance::new("small", nodes, 20.0, Precision::Exact)
}

/// Per-assignment prefix summary with a free route start `s >= E`: service
/// at the last stop begins at `max(s + t, c)`, and the route is timely for
/// `s <= s_max`.
#[derive(Clone, Copy)]
struct Prefix {
    t: f64,
    c: f64,
    s_max: f64,
}

/// Exact optimum by enumerating every visit sequence of every subset, every
/// window assignment, and every partition of the visits into routes.
///
/// For a fixed assignment the duration `max(T, C - s)` decreases in the
/// route start `s`, so it is evaluated at the latest feasible start. Returns
/// `None` if some visit cannot be served.
pub fn exhaustive_optimum(inst: &Instance) -> Option<f64> {
    let n = inst.n_visits();
    assert!(n <= 12, "exhaustive search is exponential");
    let full = (1usize << n) - 1;
    let mut route_best = vec![f64::INFINITY; full + 1];
    let h = inst.route_window();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        inst: &Instance,
        h: TimeWindow,
        last: usize,
        mask: usize,
        load: f64,
        dist: f64,
        travel: f64,
        states: &[Prefix],
        best: &mut [f64],
    ) {
        for v in inst.visit_ids() {
            let bit = 1 << (v - 1);
            if mask & bit != 0 || load + inst.demand(v) > inst.vehicle_capacity {
                continue;
            }
            let leg = inst.service(last) + inst.travel(last, v);
            let mut next = Vec::with_capacity(states.len() * inst.windows(v).len());
            for st in states {
                for w in inst.windows(v) {
                    let t = st.t + leg;
                    let c = (st.c + leg).max(w.lower);
                    let s_max = st.s_max.min(w.upper - t);
                    if c <= w.upper && s_max >= h.lower {
                        next.push(Prefix { t, c, s_max });
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            let (m2, d2, tr2) = (mask | bit, dist + inst.cost(last, v), travel + inst.travel(last, v));
            // Close the route here.
            let back = inst.service(v) + inst.travel(v, DEPOT);
            let mut dur = f64::INFINITY;
            for st in &next {
                let (t, c) = (st.t + back, st.c + back);
                let s_max = st.s_max.min(h.upper - t);
                if c <= h.upper && s_max >= h.lower {
                    dur = dur.min(t.max(c - s_max));
                }
            }
            if dur.is_finite() {
                let mut cost = d2 + inst.cost(v, DEPOT);
                if inst.minimise_time {
                    cost += dur - (tr2 + inst.travel(v, DEPOT));
                }
                if cost < best[m2] {
                    best[m2] = cost;
                }
            }
            dfs(inst, h, v, m2, load + inst.demand(v), d2, tr2, &next, best);
        }
    }

    let start = [Prefix { t: 0.0, c: f64::NEG_INFINITY, s_max: h.upper }];
    dfs(inst, h, DEPOT, 0, 0.0, 0.0, 0.0, &start, &mut route_best);

    // Set partition: the route holding the lowest remaining visit is chosen first.
    let mut opt = vec![f64::INFINITY; full + 1];
    opt[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let r = sub | low;
            if route_best[r].is_finite() && opt[mask ^ r].is_finite() {
                let c = route_best[r] + inst.vehicle_cost + opt[mask ^ r];
                if c < opt[mask] {
                    opt[mask] = c;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    opt[full].is_finite().then_some(opt[full])
}

/// Kolmogorov–Smirnov p-value (asymptotic) for statistic `d` on `n` samples.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        sum += 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
    }
    sum.clamp(0.0, 1.0)
}

/// KS statistic of integer ranks in `0..n` against the `floor(r^4 n)` law,
/// whose CDF is `P(rank <= k) = ((k + 1) / n)^(1/4)`.
pub fn rank_law_ks(ranks: &[usize], n: usize) -> f64 {
    let mut counts = vec![0usize; n];
    for &r in ranks {
        counts[r] += 1;
    }
    let total = ranks.len() as f64;
    let mut cum = 0usize;
    let mut d: f64 = 0.0;
    for (k, c) in counts.iter().enumerate() {
        cum += c;
        let f = ((k + 1) as f64 / n as f64).powf(0.25);
        d = d.max((cum as f64 / total - f).abs());
    }
    d
}
