//! Command-line front end for the VRPMTW solver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vrpmtw::alns::{self, Component, Preset, SearchConfig, SearchResult, Termination};
use vrpmtw::model::{
    parse_instance, parse_solution, perturb_instance, synthetic_instance, validate_solution, write_instance,
    write_solution, Instance,
};

#[derive(Parser)]
#[command(name = "vrpmtw", version, about = "Vehicle routing with multiple time windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the best solution.
    Solve(SolveArgs),
    /// Run repeated searches over several instances and write a CSV report.
    Bench(BenchArgs),
    /// Check a solution file against an instance.
    Validate(ValidateArgs),
    /// Generate instances: window-set perturbations of a file, or synthetic ones.
    Gen(GenArgs),
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Minimise route time (1) or distance only (0). Defaults to the
    /// instance's MINIMISE_TIME setting, else 0.
    #[arg(long, value_parser = ["0", "1"])]
    b: Option<String>,
    /// Wall-clock budget per search in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Fixed iteration count; overrides --time-limit and makes runs reproducible.
    #[arg(long)]
    iterations: Option<u64>,
    /// Random seed (bench: seed of the first repetition).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter preset (b0, b1, default) or a JSON configuration file.
    /// Defaults to the preset matching the objective.
    #[arg(long)]
    params: Option<String>,
    /// Disable a component (repeatable): random, cluster1, cluster2, cluster4,
    /// geometric, time, history, regret2, regret2-rand, temperature-tuning,
    /// implicit-time-windows, route-min.
    #[arg(long = "disable", value_name = "COMPONENT")]
    disable: Vec<String>,
    /// Fixed starting temperature (negative); disables temperature tuning.
    #[arg(long, allow_hyphen_values = true, requires = "tau_end")]
    tau_start: Option<f64>,
    /// Fixed final temperature (negative); disables temperature tuning.
    #[arg(long, allow_hyphen_values = true, requires = "tau_start")]
    tau_end: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Solution output path (JSON). Printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Path prefix for statistics: <prefix>.trace.csv, <prefix>.operators.csv
    /// and <prefix>.summary.json.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files.
    #[arg(long, num_args = 1.., required = true)]
    instance: Vec<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
    /// Repetitions per instance.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    /// Concurrent searches (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV report path. Printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Instance whose window sets are reassigned.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    instance: Option<PathBuf>,
    /// Generate synthetic instances with this many visits instead.
    #[arg(long)]
    synthetic: Option<usize>,
    /// Windows per visit for synthetic instances.
    #[arg(long, default_value_t = 3)]
    windows: usize,
    /// Seed of the first generated instance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// One row of the bench report.
#[derive(Debug, Serialize)]
struct BenchRow {
    instance: String,
    /// Routes of the best run.
    m: usize,
    best: f64,
    avg: f64,
    /// Per-run objective values, `;`-separated.
    runs: String,
    feasible_runs: usize,
}

fn load_instance(path: &Path, b: Option<&str>) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut inst = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(b) = b {
        inst.minimise_time = b == "1";
    }
    Ok(inst)
}

/// Invalid flag values detected after argument parsing; exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn search_config(args: &SearchArgs, minimise_time: bool) -> Result<SearchConfig> {
    let mut cfg = match args.params.as_deref() {
        None => SearchConfig::for_objective(minimise_time),
        Some(p) => match p.parse::<Preset>() {
            Ok(preset) => SearchConfig::preset(preset),
            Err(_) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading parameter file {p}"))?;
                serde_json::from_str(&text).with_context(|| format!("parsing parameter file {p}"))?
            }
        },
    };
    cfg.seed = args.seed;
    cfg.termination = match args.iterations {
        Some(n) => Termination::Iterations(n),
        None => Termination::Time(args.time_limit),
    };
    for d in &args.disable {
        let c: Component = d.parse().map_err(usage)?;
        if !cfg.disabled.contains(&c) {
            cfg.disabled.push(c);
        }
    }
    if let (Some(s), Some(e)) = (args.tau_start, args.tau_end) {
        cfg.fixed_temperature = Some((s, e));
        if !cfg.disabled.contains(&Component::TemperatureTuning) {
            cfg.disabled.push(Component::TemperatureTuning);
        }
    }
    cfg.check().map_err(usage)?;
    Ok(cfg)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_stats(prefix: &Path, result: &SearchResult) -> Result<()> {
    let mut w = csv::Writer::from_path(with_suffix(prefix, ".trace.csv"))?;
    for row in &result.stats.trace {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(with_suffix(prefix, ".operators.csv"))?;
    for row in &result.stats.weights {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut summary = result.stats.clone();
    summary.trace.clear();
    summary.weights.clear();
    fs::write(with_suffix(prefix, ".summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance, args.search.b.as_deref())?;
    let cfg = search_config(&args.search, inst.minimise_time)?;
    let result = alns::run(&inst, &cfg);
    let sol = &result.solution;
    let summary = format!(
        "cost={:.3} routes={} unassigned={} wall_time={:.3}s seed={}",
        sol.cost.total,
        sol.n_routes(),
        sol.unassigned.len(),
        sol.wall_time.unwrap_or(0.0),
        cfg.seed
    );
    // Fixed-iteration runs are reproducible, so leave the wall time out of the file.
    let mut doc = sol.clone();
    if args.search.iterations.is_some() {
        doc.wall_time = None;
    }
    write_or_print(args.out.as_deref(), &write_solution(&doc))?;
    if let Some(prefix) = &args.stats {
        write_stats(prefix, &result)?;
    }
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(if result.is_feasible() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let jobs = args.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let mut rows = Vec::new();
    for path in &args.instance {
        let inst = load_instance(path, args.search.b.as_deref())?;
        let cfg = search_config(&args.search, inst.minimise_time)?;
        let seeds: Vec<u64> = (0..args.reps).map(|k| args.search.seed + k).collect();
        let mut results = Vec::with_capacity(seeds.len());
        for chunk in seeds.chunks(jobs) {
            results.extend(alns::run_many(&inst, &cfg, chunk));
        }
        let best = alns::best_result(&results).expect("at least one repetition");
        let costs: Vec<f64> = results.iter().map(|r| r.solution.cost.total).collect();
        rows.push(BenchRow {
            instance: inst.name.clone(),
            m: best.solution.n_routes(),
            best: best.solution.cost.total,
            avg: costs.iter().sum::<f64>() / costs.len() as f64,
            runs: costs.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(";"),
            feasible_runs: results.iter().filter(|r| r.is_feasible()).count(),
        });
        eprintln!("{}: best {:.3} ({} routes)", inst.name, best.solution.cost.total, best.solution.n_routes());
    }
    let total = BenchRow {
        instance: "ALL".into(),
        m: rows.iter().map(|r| r.m).sum(),
        best: rows.iter().map(|r| r.best).sum(),
        avg: rows.iter().map(|r| r.avg).sum(),
        runs: String::new(),
        feasible_runs: rows.iter().map(|r| r.feasible_runs).sum(),
    };
    let all_feasible = rows.iter().all(|r| r.feasible_runs as u64 == args.reps);
    rows.push(total);
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let text = String::from_utf8(w.into_inner()?)?;
    write_or_print(args.out.as_deref(), &text)?;
    Ok(if all_feasible { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance, None)?;
    let text = fs::read_to_string(&args.solution).with_context(|| format!("reading {}", args.solution.display()))?;
    let sol = parse_solution(&text).with_context(|| format!("parsing {}", args.solution.display()))?;
    let mut inst = inst;
    inst.minimise_time = sol.minimise_time;
    let violations = validate_solution(&inst, &sol);
    for v in &violations {
        println!("violation: {v}");
    }
    match vrpmtw::model::evaluate_objective(&inst, &sol) {
        Ok(c) => println!(
            "distance={:.3} time={:.3} vehicles={:.3} total={:.3}",
            c.distance, c.time_term, c.vehicle_term, c.total
        ),
        Err(e) => println!("objective: {e}"),
    }
    if violations.is_empty() {
        println!("valid");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("invalid: {} violation(s)", violations.len());
        Ok(ExitCode::from(1))
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let base = match &args.instance {
        Some(p) => Some(load_instance(p, None)?),
        None => None,
    };
    if base.is_none() && args.windows == 0 {
        return Err(usage("--windows must be at least 1"));
    }
    for k in 0..args.count {
        let seed = args.seed + k;
        let inst = match (&base, args.synthetic) {
            (Some(b), _) => {
                let mut p = perturb_instance(b, seed);
                p.name = format!("{}-p{seed}", b.name);
                p
            }
            (None, Some(n)) => synthetic_instance(n, args.windows, seed),
            (None, None) => unreachable!("clap requires --instance or --synthetic"),
        };
        let path = args.out_dir.join(format!("{}.txt", inst.name));
        fs::write(&path, write_instance(&inst)).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}
