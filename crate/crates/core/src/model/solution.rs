use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Instance, DEPOT};

/// Service of one visit: which of its windows is used and when service starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduledStop {
    pub visit: usize,
    pub window: usize,
    pub service_start: f64,
}

/// Timed route: departure from the depot and one stop per visit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RouteSchedule {
    pub start: f64,
    pub stops: Vec<ScheduledStop>,
}

impl RouteSchedule {
    /// Arrival at the end depot when leaving each stop right after service.
    pub fn end(&self, instance: &Instance) -> f64 {
        match self.stops.last() {
            Some(s) => s.service_start + instance.service(s.visit) + instance.travel(s.visit, DEPOT),
            None => self.start,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub distance: f64,
    pub time_term: f64,
    pub vehicle_term: f64,
    pub penalty_term: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(distance: f64, time_term: f64, vehicle_term: f64, penalty_term: f64) -> Self {
        Self { distance, time_term, vehicle_term, penalty_term, total: distance + time_term + vehicle_term + penalty_term }
    }
}

/// A (possibly partial) assignment of visits to routes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    pub instance: String,
    pub minimise_time: bool,
    /// Visit sequences; the depot is implicit at both ends.
    pub routes: Vec<Vec<usize>>,
    /// One schedule per route. Required when time is minimised.
    pub schedules: Option<Vec<RouteSchedule>>,
    pub unassigned: Vec<usize>,
    pub cost: CostBreakdown,
    pub seed: Option<u64>,
    pub wall_time: Option<f64>,
}

impl Solution {
    pub fn n_routes(&self) -> usize {
        self.routes.iter().filter(|r| !r.is_empty()).count()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("time is minimised but the solution carries no schedules")]
    MissingSchedule,
    #[error("schedule {route} does not match its route")]
    ScheduleMismatch { route: usize },
}

/// Evaluates the objective: arc costs over every route (depot legs included),
/// plus, when time is minimised, service and waiting time, plus the vehicle
/// cost per non-empty route.
///
/// Waiting before the first visit is measured from the scheduled depot
/// departure; each later leg contributes `max(0, a_j - a_i - s_i - t_ij)`.
pub fn evaluate_objective(instance: &Instance, solution: &Solution) -> Result<CostBreakdown, ObjectiveError> {
    let mut distance = 0.0;
    for route in solution.routes.iter().filter(|r| !r.is_empty()) {
        let mut prev = DEPOT;
        for &v in route {
            distance += instance.cost(prev, v);
            prev = v;
        }
        distance += instance.cost(prev, DEPOT);
    }

    let mut time_term = 0.0;
    if instance.minimise_time {
        let schedules = solution.schedules.as_ref().ok_or(ObjectiveError::MissingSchedule)?;
        if schedules.len() != solution.routes.len() {
            return Err(ObjectiveError::MissingSchedule);
        }
        for (r, (route, sched)) in solution.routes.iter().zip(schedules).enumerate() {
            if route.len() != sched.stops.len() || route.iter().zip(&sched.stops).any(|(&v, s)| v != s.visit) {
                return Err(ObjectiveError::ScheduleMismatch { route: r });
            }
            let mut prev = DEPOT;
            let mut ready = sched.start;
            for stop in &sched.stops {
                let v = stop.visit;
                let wait = (stop.service_start - ready - instance.travel(prev, v)).max(0.0);
                time_term += instance.service(v) + wait;
                ready = stop.service_start + instance.service(v);
                prev = v;
            }
        }
    }

    let vehicle_term = instance.vehicle_cost * solution.n_routes() as f64;
    Ok(CostBreakdown::new(distance, time_term, vehicle_term, 0.0))
}

#[derive(Debug, Error)]
pub enum SolutionFormatError {
    #[error("malformed solution document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("route {0}: schedule stops do not match the visit list")]
    Inconsistent(usize),
    #[error("routes carry schedules inconsistently (all or none)")]
    PartialSchedules,
}

#[derive(Serialize, Deserialize)]
struct RouteDoc {
    visits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stops: Option<Vec<StopDoc>>,
}

#[derive(Serialize, Deserialize)]
struct StopDoc {
    visit: usize,
    window: usize,
    service_start: f64,
}

#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    instance: String,
    minimise_time: bool,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    wall_time_s: Option<f64>,
    cost: CostBreakdown,
    routes: Vec<RouteDoc>,
    unassigned: Vec<usize>,
}

/// Serialises a solution as a JSON object.
pub fn write_solution(solution: &Solution) -> String {
    let routes = solution
        .routes
        .iter()
        .enumerate()
        .map(|(r, visits)| {
            let sched = solution.schedules.as_ref().map(|s| &s[r]);
            RouteDoc {
                visits: visits.clone(),
                start: sched.map(|s| s.start),
                stops: sched.map(|s| {
                    s.stops.iter().map(|st| StopDoc { visit: st.visit, window: st.window, service_start: st.service_start }).collect()
                }),
            }
        })
        .collect();
    let doc = SolutionDoc {
        instance: solution.instance.clone(),
        minimise_time: solution.minimise_time,
        seed: solution.seed,
        wall_time_s: solution.wall_time,
        cost: solution.cost,
        routes,
        unassigned: solution.unassigned.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("solution documents always serialise")
}

pub fn parse_solution(text: &str) -> Result<Solution, SolutionFormatError> {
    let doc: SolutionDoc = serde_json::from_str(text)?;
    let with_schedule = doc.routes.iter().filter(|r| r.stops.is_some()).count();
    if with_schedule != 0 && with_schedule != doc.routes.len() {
        return Err(SolutionFormatError::PartialSchedules);
    }
    let mut routes = Vec::with_capacity(doc.routes.len());
    let mut schedules = Vec::new();
    for (r, rd) in doc.routes.into_iter().enumerate() {
        if let Some(stops) = rd.stops {
            if stops.len() != rd.visits.len() || stops.iter().zip(&rd.visits).any(|(s, &v)| s.visit != v) {
                return Err(SolutionFormatError::Inconsistent(r));
            }
            schedules.push(RouteSchedule {
                start: rd.start.unwrap_or(0.0),
                stops: stops.into_iter().map(|s| ScheduledStop { visit: s.visit, window: s.window, service_start: s.service_start }).collect(),
            });
        }
        routes.push(rd.visits);
    }
    Ok(Solution {
        instance: doc.instance,
        minimise_time: doc.minimise_time,
        schedules: (with_schedule > 0).then_some(schedules),
        routes,
        unassigned: doc.unassigned,
        cost: doc.cost,
        seed: doc.seed,
        wall_time: doc.wall_time_s,
    })
}
