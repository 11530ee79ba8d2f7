use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// When a search stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Wall-clock budget in seconds.
    Time(f64),
    /// Fixed number of destroy/repair iterations; fully deterministic.
    Iterations(u64),
}

/// Parameter presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Tuned for distance-only instances.
    B0,
    /// Tuned for instances that minimise route time.
    B1,
    /// Untuned defaults.
    Default,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "b0" => Ok(Preset::B0),
            "b1" => Ok(Preset::B1),
            "default" => Ok(Preset::Default),
            _ => Err(format!("unknown preset {s:?} (expected b0, b1 or default)")),
        }
    }
}

/// A search component that can be switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Component {
    Destroy(DestroyOp),
    Repair(RepairOp),
    /// Online temperature tuning; without it the fixed temperature is used.
    TemperatureTuning,
    /// Window choice by labels; without it every visit keeps the window
    /// picked when it was inserted.
    ImplicitTimeWindows,
    RouteMinimisation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DestroyOp {
    Random,
    Cluster1,
    Cluster2,
    Cluster4,
    Geometric,
    Time,
    History,
}

impl DestroyOp {
    pub const ALL: [DestroyOp; 7] = [
        DestroyOp::Random,
        DestroyOp::Cluster1,
        DestroyOp::Cluster2,
        DestroyOp::Cluster4,
        DestroyOp::Geometric,
        DestroyOp::Time,
        DestroyOp::History,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DestroyOp::Random => "random",
            DestroyOp::Cluster1 => "cluster1",
            DestroyOp::Cluster2 => "cluster2",
            DestroyOp::Cluster4 => "cluster4",
            DestroyOp::Geometric => "geometric",
            DestroyOp::Time => "time",
            DestroyOp::History => "history",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepairOp {
    Regret2,
    Regret2Rand,
}

impl RepairOp {
    pub const ALL: [RepairOp; 2] = [RepairOp::Regret2, RepairOp::Regret2Rand];

    pub fn name(self) -> &'static str {
        match self {
            RepairOp::Regret2 => "regret2",
            RepairOp::Regret2Rand => "regret2-rand",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Destroy(op) => f.write_str(op.name()),
            Component::Repair(op) => f.write_str(op.name()),
            Component::TemperatureTuning => f.write_str("temperature-tuning"),
            Component::ImplicitTimeWindows => f.write_str("implicit-time-windows"),
            Component::RouteMinimisation => f.write_str("route-min"),
        }
    }
}

impl FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase();
        if let Some(op) = DestroyOp::ALL.iter().find(|op| op.name() == s) {
            return Ok(Component::Destroy(*op));
        }
        if let Some(op) = RepairOp::ALL.iter().find(|op| op.name() == s) {
            return Ok(Component::Repair(*op));
        }
        match s.as_str() {
            "temperature-tuning" => Ok(Component::TemperatureTuning),
            "implicit-time-windows" => Ok(Component::ImplicitTimeWindows),
            "route-min" => Ok(Component::RouteMinimisation),
            _ => Err(format!("unknown component {s:?}")),
        }
    }
}

impl TryFrom<String> for Component {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Component> for String {
    fn from(c: Component) -> String {
        c.to_string()
    }
}

/// All tunable parameters of a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Improving-only iterations used to calibrate the temperature.
    pub n_iter_tt: u64,
    /// Worsening accepted with probability 1/2 at the start of the search.
    pub dcost_init: f64,
    /// Worsening accepted with probability 1/2 at the end of the search.
    pub dcost_end: f64,
    /// Operator scores for accepted, improving and new-best candidates.
    pub score_a: f64,
    pub score_i: f64,
    pub score_b: f64,
    pub decay: f64,
    /// Inclusive bounds on visits removed per iteration.
    pub removal_range: (usize, usize),
    /// Penalty per unassigned visit.
    pub p_u: f64,
    /// Cost per route during route minimisation.
    pub p_r: f64,
    /// Share of the budget after which route minimisation may end.
    pub route_min_fraction: f64,
    /// Largest relative cost perturbation of the randomised repair.
    pub regret_noise: f64,
    pub seed: u64,
    pub termination: Termination,
    pub disabled: Vec<Component>,
    /// `(tau_start, tau_end)` used when temperature tuning is disabled.
    pub fixed_temperature: Option<(f64, f64)>,
    /// Recompute every cached insertion and panic on a mismatch.
    pub verify_cache: bool,
    /// Trace sampling interval in iterations (improvements are always traced).
    pub trace_every: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self::preset(Preset::Default)
    }
}

impl SearchConfig {
    pub fn preset(preset: Preset) -> Self {
        let (n_iter_tt, dcost_init, dcost_end, score_a, score_i, score_b, decay) = match preset {
            Preset::B0 => (5000, 300.0, 2.33, 4.0, 15.0, 17.0, 0.75),
            Preset::B1 => (1600, 26.0, 5.5, 2.0, 8.0, 16.0, 0.83),
            Preset::Default => (1000, 10.0, 3.0, 2.0, 4.0, 10.0, 0.9),
        };
        SearchConfig {
            n_iter_tt,
            dcost_init,
            dcost_end,
            score_a,
            score_i,
            score_b,
            decay,
            removal_range: (10, 40),
            p_u: 10_000.0,
            p_r: 1_000_000.0,
            route_min_fraction: 0.10,
            regret_noise: 0.5,
            seed: 0,
            termination: Termination::Time(60.0),
            disabled: Vec::new(),
            fixed_temperature: None,
            verify_cache: false,
            trace_every: 100,
        }
    }

    /// The tuned preset for the instance's objective.
    pub fn for_objective(minimise_time: bool) -> Self {
        Self::preset(if minimise_time { Preset::B1 } else { Preset::B0 })
    }

    pub fn is_enabled(&self, c: Component) -> bool {
        !self.disabled.contains(&c)
    }

    /// Checks parameter ranges.
    pub fn check(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.decay) {
            return Err(format!("decay {} outside [0, 1]", self.decay));
        }
        if self.removal_range.0 < 1 || self.removal_range.0 > self.removal_range.1 {
            return Err(format!("bad removal range {:?}", self.removal_range));
        }
        if [self.score_a, self.score_i, self.score_b].iter().any(|&s| s < 1.0) {
            return Err("scores must be at least 1".into());
        }
        if self.dcost_init <= 0.0 || self.dcost_end <= 0.0 {
            return Err("cost deltas must be positive".into());
        }
        if !(0.0..1.0).contains(&self.route_min_fraction) {
            return Err(format!("route_min_fraction {} outside [0, 1)", self.route_min_fraction));
        }
        if self.regret_noise < 0.0 {
            return Err("regret_noise must be nonnegative".into());
        }
        match self.termination {
            Termination::Time(t) if !(t > 0.0) => return Err("time limit must be positive".into()),
            Termination::Iterations(0) => return Err("iteration count must be positive".into()),
            _ => {}
        }
        if let Some((s, e)) = self.fixed_temperature {
            if !(s < 0.0 && e < 0.0) {
                return Err("fixed temperatures must be negative".into());
            }
        }
        if DestroyOp::ALL.iter().all(|&op| !self.is_enabled(Component::Destroy(op))) {
            return Err("every destroy operator is disabled".into());
        }
        if RepairOp::ALL.iter().all(|&op| !self.is_enabled(Component::Repair(op))) {
            return Err("every repair operator is disabled".into());
        }
        Ok(())
    }
}
