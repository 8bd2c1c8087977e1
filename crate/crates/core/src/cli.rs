//! Command-line front end: `solve`, `bench` and `compare`.

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{format_table, merge_traces, run_trace_csv, run_trials_with_matrix, BenchReport, SolverSpec};
use crate::error::{Error, Result};
use crate::tour::Tour;
use crate::tsplib::{Metric, TspInstance};

#[derive(Debug, Parser)]
#[command(name = "sta-tsp", version, about = "State transition algorithm for the symmetric TSP")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance once and write the tour, length and trace.
    Solve(SolveArgs),
    /// Run repeated seeded trials per solver and write reports plus a summary table.
    Bench(BenchArgs),
    /// Run trials for several solvers and merge their average convergence curves.
    Compare(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TSPLIB instance file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Distance metric: raw (unrounded Euclidean) or the file's TSPLIB type.
    #[arg(long, default_value = "raw")]
    pub metric: Metric,
    /// Master seed; drawn from system entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// STA search enforcement (candidates per phase).
    #[arg(long)]
    pub se: Option<usize>,
    /// Iteration count, applied to every selected solver.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Swap factor.
    #[arg(long)]
    pub ma: Option<usize>,
    /// Shift factor.
    #[arg(long)]
    pub mb: Option<usize>,
    /// Symmetry factor.
    #[arg(long)]
    pub mc: Option<usize>,
    /// Redraw swap moves that leave the tour unchanged.
    #[arg(long)]
    pub skip_identity_swaps: bool,
    /// Wall-clock cap for STA runs, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// SA initial temperature.
    #[arg(long)]
    pub t0: Option<f64>,
    /// SA cooling rate.
    #[arg(long)]
    pub cooling: Option<f64>,
    /// ACO pheromone weight.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// ACO heuristic weight.
    #[arg(long)]
    pub beta: Option<f64>,
    /// ACO pheromone persistence.
    #[arg(long)]
    pub rho: Option<f64>,
    /// ACO colony size.
    #[arg(long)]
    pub ants: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "sta")]
    pub solver: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated solver list.
    #[arg(long, alias = "solver", value_delimiter = ',', default_value = "sta,sa,aco")]
    pub solvers: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

impl Overrides {
    /// Default configuration of `name` with these overrides applied.
    pub fn spec_for(&self, name: &str, seed: u64) -> Result<SolverSpec> {
        let mut spec = SolverSpec::default_for(name)?.with_seed(seed);
        match &mut spec {
            SolverSpec::Sta(c) => {
                set(&mut c.search_enforcement, self.se);
                set(&mut c.max_iters, self.iters);
                set(&mut c.params.swap_factor, self.ma);
                set(&mut c.params.shift_factor, self.mb);
                set(&mut c.params.symmetry_factor, self.mc);
                c.params.skip_identity_swaps = self.skip_identity_swaps;
                c.time_limit_secs = self.time_limit;
                c.validate()?;
            }
            SolverSpec::Sa(c) => {
                set(&mut c.t0, self.t0);
                set(&mut c.cooling, self.cooling);
                set(&mut c.iters, self.iters);
                c.validate()?;
            }
            SolverSpec::Aco(c) => {
                set(&mut c.alpha, self.alpha);
                set(&mut c.beta, self.beta);
                set(&mut c.rho, self.rho);
                set(&mut c.ants, self.ants);
                set(&mut c.iters, self.iters);
                c.validate()?;
            }
        }
        Ok(spec)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

struct Loaded {
    instance: TspInstance,
    stem: String,
    seed: u64,
}

fn load(common: &CommonArgs) -> Result<Loaded> {
    let instance = TspInstance::from_file(&common.instance)?.with_metric(common.metric)?;
    let stem = common
        .instance
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| instance.name.clone());
    let seed = common.seed.unwrap_or_else(rand::random);
    fs::create_dir_all(&common.out)?;
    Ok(Loaded { instance, stem, seed })
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents)?;
    written.push(path);
    Ok(())
}

#[derive(Serialize)]
struct SolveArtifact<'a> {
    solver: &'a str,
    instance: &'a str,
    metric: Metric,
    n: usize,
    seed: u64,
    spec: &'a SolverSpec,
    best_length: f64,
    best_tour: &'a Tour,
    eval_count: u64,
    trace: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    current_trace: Option<&'a [f64]>,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Vec<PathBuf>> {
    let Loaded { instance, stem, seed } = load(&args.common)?;
    let spec = args.common.overrides.spec_for(&args.solver, seed)?;
    let run = spec.solve(&instance.distance_matrix())?;
    let label = spec.label();

    let artifact = SolveArtifact {
        solver: label,
        instance: &instance.name,
        metric: instance.active_metric,
        n: instance.n(),
        seed,
        spec: &spec,
        best_length: run.best_length,
        best_tour: &run.best_tour,
        eval_count: run.eval_count,
        trace: &run.trace,
        current_trace: run.current_trace.as_deref(),
    };
    let out = &args.common.out;
    let mut written = Vec::new();
    write(out.join(format!("{stem}_{label}_solve.json")), &serde_json::to_string_pretty(&artifact)?, &mut written)?;
    write(out.join(format!("{stem}_{label}.tour")), &format!("{}\n", run.best_tour), &mut written)?;
    write(out.join(format!("{stem}_{label}_trace.csv")), &run_trace_csv(label, &run.trace), &mut written)?;

    println!(
        "{label} {} ({}): length {:.4}, {} evaluations, {:.3}s, seed {seed}",
        instance.name, instance.active_metric, run.best_length, run.eval_count, run.wall_time
    );
    Ok(written)
}

fn unique_solvers(names: &[String]) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for raw in names {
        let name = raw.trim().to_ascii_lowercase();
        SolverSpec::default_for(&name)?;
        if !seen.insert(name.clone()) {
            return Err(Error::InvalidConfig(format!("solver `{name}` listed more than once")));
        }
        out.push(name);
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("no solver selected".into()));
    }
    Ok(out)
}

fn run_reports(args: &BenchArgs, loaded: &Loaded, solvers: &[String]) -> Result<Vec<BenchReport>> {
    let dmat = loaded.instance.distance_matrix();
    solvers
        .iter()
        .map(|name| {
            let spec = args.common.overrides.spec_for(name, loaded.seed)?;
            let report = run_trials_with_matrix(
                &spec,
                &loaded.instance.name,
                loaded.instance.active_metric,
                &dmat,
                args.trials,
                loaded.seed,
            )?;
            if !report.failures.is_empty() {
                eprintln!(
                    "warning: {} of {} {name} trials failed and are excluded from the statistics",
                    report.failures.len(),
                    args.trials
                );
            }
            Ok(report)
        })
        .collect()
}

pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<PathBuf>> {
    let solvers = unique_solvers(&args.solvers)?;
    let loaded = load(&args.common)?;
    let reports = run_reports(args, &loaded, &solvers)?;

    let out = &args.common.out;
    let stem = &loaded.stem;
    let mut written = Vec::new();
    for r in &reports {
        write(out.join(format!("{stem}_{}_report.json", r.solver)), &r.to_json()?, &mut written)?;
        write(out.join(format!("{stem}_{}_trace.csv", r.solver)), &r.trace_csv(), &mut written)?;
        if let Some(current) = &r.avg_current_trace {
            let csv = run_trace_csv(&format!("{}_current_avg", r.solver), current);
            write(out.join(format!("{stem}_{}_current_trace.csv", r.solver)), &csv, &mut written)?;
        }
    }
    let table = format_table(&reports);
    write(out.join(format!("{stem}_table.txt")), &table, &mut written)?;
    print!("{table}");
    Ok(written)
}

pub fn cmd_compare(args: &BenchArgs) -> Result<Vec<PathBuf>> {
    let solvers = unique_solvers(&args.solvers)?;
    if solvers.len() < 2 {
        return Err(Error::InvalidConfig("compare needs at least two solvers".into()));
    }
    let loaded = load(&args.common)?;
    let reports = run_reports(args, &loaded, &solvers)?;
    let columns: Vec<(&str, &[f64])> =
        reports.iter().map(|r| (r.solver.as_str(), r.avg_trace.as_slice())).collect();
    let csv = merge_traces(&columns)?;

    let mut written = Vec::new();
    let path = args.common.out.join(format!("{}_compare.csv", loaded.stem));
    write(path.clone(), &csv, &mut written)?;
    println!("{} rows written to {}", csv.lines().count() - 1, path.display());
    Ok(written)
}

/// Runs a parsed command and returns the paths of the artifacts written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

/// Convenience for tests and embedding: parse `args` (including the program
/// name) and run.
pub fn run_from_args<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    run(&cli)
}

