use rand::Rng;

/// Outcome of one candidate, from worst to best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Rejected,
    Accepted,
    Improved,
    NewBest,
}

/// Operators with adaptive roulette weights. Disabled operators keep weight
/// zero and are never selected.
#[derive(Debug, Clone)]
pub struct OperatorBank {
    pub names: Vec<&'static str>,
    pub weights: Vec<f64>,
    pub enabled: Vec<bool>,
    pub uses: Vec<u64>,
}

impl OperatorBank {
    pub fn new(names: Vec<&'static str>, enabled: Vec<bool>) -> Self {
        let n = names.len();
        assert_eq!(enabled.len(), n);
        assert!(enabled.iter().any(|&e| e), "no operator enabled");
        OperatorBank { names, weights: enabled.iter().map(|&e| if e { 1.0 } else { 0.0 }).collect(), enabled, uses: vec![0; n] }
    }

    /// Roulette selection proportional to weight.
    pub fn select(&mut self, rng: &mut impl Rng) -> usize {
        let total: f64 = self.weights.iter().sum();
        let mut x = rng.gen::<f64>() * total;
        let mut pick = self.enabled.iter().rposition(|&e| e).unwrap();
        for (k, &w) in self.weights.iter().enumerate() {
            if w > 0.0 && x < w {
                pick = k;
                break;
            }
            x -= w;
        }
        self.uses[pick] += 1;
        pick
    }

    /// `w <- w * decay + score * (1 - decay)`.
    pub fn update(&mut self, op: usize, score: f64, decay: f64) {
        debug_assert!(self.enabled[op]);
        self.weights[op] = self.weights[op] * decay + score * (1.0 - decay);
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }
}

/// Score of an outcome.
pub fn outcome_score(outcome: Outcome, score_a: f64, score_i: f64, score_b: f64) -> f64 {
    match outcome {
        Outcome::Rejected => 1.0,
        Outcome::Accepted => score_a,
        Outcome::Improved => score_i,
        Outcome::NewBest => score_b,
    }
}

/// Annealing schedule. Temperatures are negative; a worsening `d` on a
/// solution of cost `c` is accepted with probability `exp(d / c * tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperature {
    pub tau_start: f64,
    pub tau_end: f64,
}

impl Temperature {
    /// The temperatures at which a worsening of `dcost_init` (resp.
    /// `dcost_end`) on a solution of cost `cost` is accepted half the time.
    pub fn calibrated(cost: f64, dcost_init: f64, dcost_end: f64) -> Self {
        let ln_half = 0.5f64.ln();
        Temperature { tau_start: ln_half * cost / dcost_init, tau_end: ln_half * cost / dcost_end }
    }

    /// Geometric interpolation at progress `f` in `[0, 1]`.
    pub fn at(&self, f: f64) -> f64 {
        let f = f.clamp(0.0, 1.0);
        self.tau_start * (self.tau_end / self.tau_start).powf(f)
    }
}

/// Annealing acceptance: non-worsening always, otherwise with probability
/// `exp(delta / scale * tau)`.
pub fn accept(delta: f64, scale: f64, tau: f64, rng: &mut impl Rng) -> bool {
    if delta <= 0.0 {
        return true;
    }
    if !(scale > 0.0) {
        return false;
    }
    rng.gen::<f64>() < (delta / scale * tau).exp()
}

/// Largest number of unassigned visits tolerated by route minimisation at
/// `elapsed` (fraction of the budget): `floor(percent_left / 10) - 2`,
/// clamped to `[0, 5]`.
pub fn unassigned_threshold(elapsed: f64) -> usize {
    let left = 100.0 * (1.0 - elapsed.clamp(0.0, 1.0));
    ((left / 10.0 + 1e-9).floor() - 2.0).clamp(0.0, 5.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn thresholds() {
        assert_eq!(unassigned_threshold(0.30), 5);
        assert_eq!(unassigned_threshold(0.0), 5);
        assert_eq!(unassigned_threshold(0.50), 3);
        assert_eq!(unassigned_threshold(0.80), 0);
        assert_eq!(unassigned_threshold(1.0), 0);
    }

    #[test]
    fn acceptance_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(accept(0.0, 100.0, -1.0, &mut rng));
        assert!(accept(-5.0, 100.0, -1.0, &mut rng));
        assert!((0..1000).all(|_| !accept(1.0, 100.0, -1e12, &mut rng)));
    }

    #[test]
    fn equal_deltas_give_constant_temperature() {
        let t = Temperature::calibrated(1000.0, 5.0, 5.0);
        assert_eq!(t.at(0.0), t.at(0.7));
        let t = Temperature::calibrated(1000.0, 300.0, 2.33);
        let taus: Vec<f64> = (0..=10).map(|k| t.at(k as f64 / 10.0)).collect();
        assert!(taus.windows(2).all(|w| w[1] < w[0]));
        assert!((t.at(1.0) - t.tau_end).abs() < 1e-9);
    }

    #[test]
    fn decay_one_freezes_weights() {
        let mut b = OperatorBank::new(vec!["a", "b"], vec![true, true]);
        b.update(0, 17.0, 1.0);
        assert_eq!(b.weights, vec![1.0, 1.0]);
        b.update(0, 17.0, 0.5);
        assert_eq!(b.weights[0], 9.0);
    }

    #[test]
    fn disabled_operators_are_never_selected() {
        let mut b = OperatorBank::new(vec!["a", "b", "c"], vec![true, false, true]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            assert_ne!(b.select(&mut rng), 1);
        }
        assert_eq!(b.uses[1], 0);
    }
}
