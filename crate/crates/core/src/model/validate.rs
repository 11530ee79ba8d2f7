use std::fmt;

use super::{Instance, Solution, DEPOT};

/// Slack allowed on time comparisons when checking schedules produced in
/// floating point.
pub const TIME_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UnknownVisit { visit: usize },
    /// A visit served (or listed) a number of times other than once.
    Coverage { visit: usize, count: usize },
    /// A visit left unassigned.
    Unserved { visit: usize },
    Capacity { route: usize, load: f64 },
    /// No window assignment makes the route timely.
    RouteInfeasible { route: usize },
    MissingSchedule,
    ScheduleMismatch { route: usize },
    BadWindowIndex { route: usize, visit: usize, window: usize },
    Window { route: usize, visit: usize, service_start: f64 },
    /// Service starts before the vehicle can get there.
    Travel { route: usize, visit: usize, service_start: f64, earliest: f64 },
    DepotDeparture { route: usize, start: f64 },
    Deadline { route: usize, end: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownVisit { visit } => write!(f, "unknown visit {visit}"),
            Violation::Coverage { visit, count } => write!(f, "visit {visit} appears {count} times"),
            Violation::Unserved { visit } => write!(f, "visit {visit} is not served"),
            Violation::Capacity { route, load } => write!(f, "route {route} carries {load} above capacity"),
            Violation::RouteInfeasible { route } => write!(f, "route {route} has no timely schedule"),
            Violation::MissingSchedule => write!(f, "schedules required when time is minimised"),
            Violation::ScheduleMismatch { route } => write!(f, "schedule of route {route} does not match its visits"),
            Violation::BadWindowIndex { route, visit, window } => {
                write!(f, "route {route}: visit {visit} has no window {window}")
            }
            Violation::Window { route, visit, service_start } => {
                write!(f, "route {route}: visit {visit} served at {service_start} outside its window")
            }
            Violation::Travel { route, visit, service_start, earliest } => {
                write!(f, "route {route}: visit {visit} served at {service_start}, cannot arrive before {earliest}")
            }
            Violation::DepotDeparture { route, start } => write!(f, "route {route} departs at {start} before the depot opens"),
            Violation::Deadline { route, end } => write!(f, "route {route} returns at {end} after the deadline"),
        }
    }
}

/// Checks a solution against coverage, capacity, window, travel and deadline
/// constraints. The report is empty iff the solution is feasible.
///
/// Routes without a schedule are checked for the existence of a timely
/// schedule (earliest-start propagation, which is exact because waiting is
/// allowed). When time is minimised, schedules are mandatory.
pub fn validate_solution(instance: &Instance, solution: &Solution) -> Vec<Violation> {
    let mut report = Vec::new();
    let n = instance.n_visits();
    let mut seen = vec![0usize; n + 1];
    for &v in solution.routes.iter().flatten().chain(&solution.unassigned) {
        if v == DEPOT || v > n {
            report.push(Violation::UnknownVisit { visit: v });
        } else {
            seen[v] += 1;
        }
    }
    for v in 1..=n {
        if seen[v] != 1 {
            report.push(Violation::Coverage { visit: v, count: seen[v] });
        }
    }
    for &v in &solution.unassigned {
        if v != DEPOT && v <= n {
            report.push(Violation::Unserved { visit: v });
        }
    }
    if !report.is_empty() {
        // Index errors make the remaining checks meaningless.
        if report.iter().any(|v| matches!(v, Violation::UnknownVisit { .. })) {
            return report;
        }
    }

    for (r, route) in solution.routes.iter().enumerate() {
        let load: f64 = route.iter().map(|&v| instance.demand(v)).sum();
        if load > instance.vehicle_capacity + TIME_TOLERANCE {
            report.push(Violation::Capacity { route: r, load });
        }
        if !route.is_empty() && !has_timely_schedule(instance, route) {
            report.push(Violation::RouteInfeasible { route: r });
        }
    }

    match &solution.schedules {
        None if instance.minimise_time => report.push(Violation::MissingSchedule),
        None => {}
        Some(schedules) => {
            if schedules.len() != solution.routes.len() {
                report.push(Violation::MissingSchedule);
                return report;
            }
            for (r, (route, sched)) in solution.routes.iter().zip(schedules).enumerate() {
                if route.is_empty() {
                    continue;
                }
                if route.len() != sched.stops.len() || route.iter().zip(&sched.stops).any(|(&v, s)| v != s.visit) {
                    report.push(Violation::ScheduleMismatch { route: r });
                    continue;
                }
                let horizon = instance.depot_window();
                if sched.start < horizon.lower - TIME_TOLERANCE {
                    report.push(Violation::DepotDeparture { route: r, start: sched.start });
                }
                let mut prev = DEPOT;
                let mut ready = sched.start;
                for stop in &sched.stops {
                    let v = stop.visit;
                    let earliest = ready + instance.travel(prev, v);
                    if stop.service_start < earliest - TIME_TOLERANCE {
                        report.push(Violation::Travel { route: r, visit: v, service_start: stop.service_start, earliest });
                    }
                    match instance.windows(v).get(stop.window) {
                        None => report.push(Violation::BadWindowIndex { route: r, visit: v, window: stop.window }),
                        Some(w) => {
                            if stop.service_start < w.lower - TIME_TOLERANCE || stop.service_start > w.upper + TIME_TOLERANCE {
                                report.push(Violation::Window { route: r, visit: v, service_start: stop.service_start });
                            }
                        }
                    }
                    ready = stop.service_start + instance.service(v);
                    prev = v;
                }
                let end = sched.end(instance);
                if end > instance.end_bound() + TIME_TOLERANCE {
                    report.push(Violation::Deadline { route: r, end });
                }
            }
        }
    }
    report
}

fn has_timely_schedule(instance: &Instance, route: &[usize]) -> bool {
    let mut prev = DEPOT;
    let mut t = instance.depot_window().lower;
    for &v in route {
        let arrival = t + instance.service(prev) + instance.travel(prev, v);
        match instance.windows(v).iter().find(|w| w.upper + TIME_TOLERANCE >= arrival) {
            Some(w) => t = arrival.max(w.lower),
            None => return false,
        }
        prev = v;
    }
    t + instance.service(prev) + instance.travel(prev, DEPOT) <= instance.end_bound() + TIME_TOLERANCE
}
