//! Instance text format.
//!
//! Extended Solomon layout:
//!
//! ```text
//! VRPMTW 1 exact
//! rm101
//! VEHICLE
//! NUMBER     CAPACITY
//!   25         200
//! DEADLINE 230
//! CUSTOMER
//! CUST NO.  XCOORD.  YCOORD.  DEMAND  SERVICE  NWIN  WINDOWS
//!     0      35       35        0       0       1     0 230
//!     1      41       49       10      10       2     20 40   100 130
//! ```
//!
//! The third header token is the travel-time precision: `exact` keeps raw
//! Euclidean distances, an integer `d` rounds them to `d` decimals. Optional
//! `DEADLINE`, `VEHICLE_COST` and `MINIMISE_TIME` lines may appear before the
//! `CUSTOMER` section. Files without the `VRPMTW` header are read as classic
//! Solomon files (`id x y demand ready due service`), i.e. one window per visit.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use super::{Instance, TimeWindow, Visit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Exact,
    Decimals(u32),
}

impl Precision {
    pub fn apply(self, value: f64) -> f64 {
        match self {
            Precision::Exact => value,
            Precision::Decimals(d) => {
                let scale = 10f64.powi(d as i32);
                (value * scale).round() / scale
            }
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Exact => f.write_str("exact"),
            Precision::Decimals(d) => write!(f, "{d}"),
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Precision::Exact);
        }
        s.parse::<u32>().map(Precision::Decimals).map_err(|_| format!("bad precision `{s}`"))
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn number(tok: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| err(line, format!("expected a number for {what}, found `{tok}`")))
}

enum Section {
    Preamble,
    Vehicle,
    Customer,
}

/// Parses an instance document (extended or classic Solomon).
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let (first_no, first) = lines.next().ok_or_else(|| err(1, "empty document"))?;
    let mut tokens = first.split_whitespace();
    let extended = tokens.next() == Some("VRPMTW");
    let precision = if extended {
        match tokens.next() {
            Some("1") => {}
            Some(v) => return Err(err(first_no, format!("unsupported format version `{v}`"))),
            None => return Err(err(first_no, "missing format version")),
        }
        let p = tokens.next().ok_or_else(|| err(first_no, "missing precision"))?;
        p.parse::<Precision>().map_err(|m| err(first_no, m))?
    } else {
        Precision::Exact
    };

    let name = if extended {
        lines.next().map(|(_, l)| l.to_string()).ok_or_else(|| err(first_no + 1, "missing instance name"))?
    } else {
        first.to_string()
    };

    let mut section = Section::Preamble;
    let mut capacity: Option<f64> = None;
    let mut deadline: Option<f64> = None;
    let mut vehicle_cost: Option<f64> = None;
    let mut minimise_time = false;
    let mut nodes: Vec<Visit> = Vec::new();

    for (no, line) in lines {
        let upper = line.to_ascii_uppercase();
        let toks: Vec<&str> = line.split_whitespace().collect();
        let numeric = toks[0].parse::<f64>().is_ok();
        if !numeric {
            match toks[0].to_ascii_uppercase().as_str() {
                "VEHICLE" => section = Section::Vehicle,
                "CUSTOMER" => section = Section::Customer,
                "DEADLINE" if extended => deadline = Some(key_value(&toks, no)?),
                "VEHICLE_COST" if extended => vehicle_cost = Some(key_value(&toks, no)?),
                "MINIMISE_TIME" if extended => {
                    minimise_time = match toks.get(1).copied() {
                        Some("0") => false,
                        Some("1") => true,
                        _ => return Err(err(no, "MINIMISE_TIME expects 0 or 1")),
                    }
                }
                // Column captions such as `NUMBER CAPACITY` or `CUST NO. ...`.
                _ if upper.starts_with("NUMBER") || upper.starts_with("CUST") => {}
                _ => return Err(err(no, format!("unexpected line `{line}`"))),
            }
            continue;
        }
        match section {
            Section::Preamble => return Err(err(no, "data before VEHICLE/CUSTOMER section")),
            Section::Vehicle => {
                if toks.len() != 2 {
                    return Err(err(no, "vehicle line must be `<number> <capacity>`"));
                }
                let cap = number(toks[1], no, "capacity")?;
                if cap < 0.0 {
                    return Err(err(no, "negative capacity"));
                }
                capacity = Some(cap);
            }
            Section::Customer => {
                let visit = if extended { extended_customer(&toks, no)? } else { solomon_customer(&toks, no)? };
                if visit.id != nodes.len() {
                    return Err(err(no, format!("expected customer id {}, found {}", nodes.len(), visit.id)));
                }
                if nodes.is_empty() && visit.windows.len() != 1 {
                    return Err(err(no, "the depot must have exactly one window"));
                }
                nodes.push(visit);
            }
        }
    }

    let capacity = capacity.ok_or_else(|| err(first_no, "missing VEHICLE section"))?;
    if nodes.is_empty() {
        return Err(err(first_no, "missing depot line"));
    }
    let mut inst = Instance::new(name, nodes, capacity, precision);
    if let Some(d) = deadline {
        inst.duration_deadline = d;
    }
    if let Some(c) = vehicle_cost {
        inst.vehicle_cost = c;
    }
    inst.minimise_time = minimise_time;
    Ok(inst)
}

fn key_value(toks: &[&str], no: usize) -> Result<f64, ParseError> {
    match toks {
        [key, v] => number(v, no, key),
        _ => Err(err(no, format!("`{}` expects one value", toks[0]))),
    }
}

fn common_fields(toks: &[&str], no: usize) -> Result<(usize, f64, f64, f64), ParseError> {
    let id = toks[0].parse::<usize>().map_err(|_| err(no, format!("bad customer id `{}`", toks[0])))?;
    let x = number(toks[1], no, "x")?;
    let y = number(toks[2], no, "y")?;
    let demand = number(toks[3], no, "demand")?;
    if demand < 0.0 {
        return Err(err(no, "negative demand"));
    }
    Ok((id, x, y, demand))
}

fn checked_windows(mut windows: Vec<TimeWindow>, no: usize) -> Result<Vec<TimeWindow>, ParseError> {
    if windows.is_empty() {
        return Err(err(no, "a visit needs at least one window"));
    }
    if let Some(w) = windows.iter().find(|w| w.lower > w.upper) {
        return Err(err(no, format!("inverted window [{}, {}]", w.lower, w.upper)));
    }
    windows.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    for pair in windows.windows(2) {
        if pair[0].upper >= pair[1].lower {
            return Err(err(
                no,
                format!("overlapping windows [{}, {}] and [{}, {}]", pair[0].lower, pair[0].upper, pair[1].lower, pair[1].upper),
            ));
        }
    }
    Ok(windows)
}

fn extended_customer(toks: &[&str], no: usize) -> Result<Visit, ParseError> {
    if toks.len() < 6 {
        return Err(err(no, "customer line needs id x y demand service nwin"));
    }
    let (id, x, y, demand) = common_fields(toks, no)?;
    let service_time = number(toks[4], no, "service")?;
    if service_time < 0.0 {
        return Err(err(no, "negative service time"));
    }
    let count = toks[5].parse::<usize>().map_err(|_| err(no, format!("bad window count `{}`", toks[5])))?;
    if toks.len() != 6 + 2 * count {
        return Err(err(no, format!("expected {count} window pairs, found {} values", toks.len() - 6)));
    }
    let windows = toks[6..]
        .chunks(2)
        .map(|c| Ok(TimeWindow { lower: number(c[0], no, "window lower")?, upper: number(c[1], no, "window upper")? }))
        .collect::<Result<Vec<_>, ParseError>>()?;
    Ok(Visit { id, x, y, demand, service_time, windows: checked_windows(windows, no)? })
}

fn solomon_customer(toks: &[&str], no: usize) -> Result<Visit, ParseError> {
    if toks.len() != 7 {
        return Err(err(no, "customer line needs id x y demand ready due service"));
    }
    let (id, x, y, demand) = common_fields(toks, no)?;
    let ready = number(toks[4], no, "ready time")?;
    let due = number(toks[5], no, "due date")?;
    let service_time = number(toks[6], no, "service")?;
    if service_time < 0.0 {
        return Err(err(no, "negative service time"));
    }
    let windows = checked_windows(vec![TimeWindow { lower: ready, upper: due }], no)?;
    Ok(Visit { id, x, y, demand, service_time, windows })
}

/// Writes an instance in the extended format. Parsing the output yields an
/// equal instance as long as coordinates and windows round-trip through
/// their shortest decimal representation (they do for `f64`).
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "VRPMTW 1 {}", instance.precision);
    let _ = writeln!(out, "{}", instance.name);
    let _ = writeln!(out, "VEHICLE");
    let _ = writeln!(out, "NUMBER CAPACITY");
    let _ = writeln!(out, "{} {}", instance.n_visits().max(1), instance.vehicle_capacity);
    let _ = writeln!(out, "DEADLINE {}", instance.duration_deadline);
    let _ = writeln!(out, "VEHICLE_COST {}", instance.vehicle_cost);
    let _ = writeln!(out, "MINIMISE_TIME {}", u8::from(instance.minimise_time));
    let _ = writeln!(out, "CUSTOMER");
    let _ = writeln!(out, "CUST_NO XCOORD YCOORD DEMAND SERVICE NWIN WINDOWS");
    for v in instance.nodes() {
        let _ = write!(out, "{} {} {} {} {} {}", v.id, v.x, v.y, v.demand, v.service_time, v.windows.len());
        for w in &v.windows {
            let _ = write!(out, " {} {}", w.lower, w.upper);
        }
        out.push('\n');
    }
    out
}
