//! Multi-trial experiments: independent seeded runs, summary statistics,
//! averaged convergence curves, and the CSV/JSON/text artifacts built from
//! them.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{aco_solve_matrix, sa_solve_matrix, AcoConfig, SaConfig};
use crate::error::{Error, Result};
use crate::run::RunResult;
use crate::sta::{sta_solve_matrix, StaConfig};
use crate::tour::{tour_length, DistanceMatrix, Tour};
use crate::tsplib::{Metric, TspInstance};

pub const STDEV_CONVENTION: &str = "sample (n-1)";

/// A solver together with its full configuration. The `seed` inside the
/// configuration is replaced per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", content = "config", rename_all = "lowercase")]
pub enum SolverSpec {
    Sta(StaConfig),
    Sa(SaConfig),
    Aco(AcoConfig),
}

impl SolverSpec {
    pub fn label(&self) -> &'static str {
        match self {
            SolverSpec::Sta(_) => "sta",
            SolverSpec::Sa(_) => "sa",
            SolverSpec::Aco(_) => "aco",
        }
    }

    /// Default configuration for a solver name (`sta`, `sa`, `aco`).
    pub fn default_for(name: &str) -> Result<Self> {
        match name {
            "sta" => Ok(SolverSpec::Sta(StaConfig::default())),
            "sa" => Ok(SolverSpec::Sa(SaConfig::default())),
            "aco" => Ok(SolverSpec::Aco(AcoConfig::default())),
            other => Err(Error::InvalidConfig(format!(
                "unknown solver `{other}` (expected sta, sa or aco)"
            ))),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SolverSpec::Sta(c) => c.seed,
            SolverSpec::Sa(c) => c.seed,
            SolverSpec::Aco(c) => c.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            SolverSpec::Sta(c) => c.seed = seed,
            SolverSpec::Sa(c) => c.seed = seed,
            SolverSpec::Aco(c) => c.seed = seed,
        }
        out
    }

    pub fn solve(&self, dmat: &DistanceMatrix) -> Result<RunResult> {
        match self {
            SolverSpec::Sta(c) => sta_solve_matrix(dmat, c),
            SolverSpec::Sa(c) => sa_solve_matrix(dmat, c),
            SolverSpec::Aco(c) => aco_solve_matrix(dmat, c),
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master_seed`.
pub fn trial_seed(master_seed: u64, index: usize) -> u64 {
    mix64(master_seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub best_length: f64,
    pub best_tour: Tour,
    pub wall_time: f64,
    pub eval_count: u64,
    pub trace: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_trace: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub error: String,
}

pub type TrialOutcome = std::result::Result<TrialRecord, TrialFailure>;

/// Runs trial `index` of an experiment. The reported length is recomputed
/// from the returned tour.
pub fn run_trial(
    spec: &SolverSpec,
    dmat: &DistanceMatrix,
    master_seed: u64,
    index: usize,
) -> TrialOutcome {
    let seed = trial_seed(master_seed, index);
    let fail = |e: Error| TrialFailure { trial: index, seed, error: e.to_string() };
    let clock = Instant::now();
    let run = spec.with_seed(seed).solve(dmat).map_err(fail)?;
    let wall_time = clock.elapsed().as_secs_f64();
    let best_length = tour_length(&run.best_tour, dmat).map_err(fail)?;
    Ok(TrialRecord {
        trial: index,
        seed,
        best_length,
        best_tour: run.best_tour,
        wall_time,
        eval_count: run.eval_count,
        trace: run.trace,
        current_trace: run.current_trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
    pub stdev: f64,
}

/// Min, mean, max and sample standard deviation (0 for a single value).
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    let stdev = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Some(Summary { best, mean: mean.clamp(best, worst), worst, stdev })
}

/// Element-wise mean of equally indexed series, truncated to the shortest.
fn average_series<'a>(series: impl Iterator<Item = &'a [f64]> + Clone) -> Vec<f64> {
    let count = series.clone().count();
    let Some(len) = series.clone().map(<[f64]>::len).min() else {
        return Vec::new();
    };
    let mut out = vec![0.0; len];
    for s in series {
        for (acc, v) in out.iter_mut().zip(s) {
            *acc += v;
        }
    }
    for v in &mut out {
        *v /= count as f64;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub solver: String,
    pub instance: String,
    pub metric: Metric,
    /// Configuration echo; its seed is the master seed.
    pub spec: SolverSpec,
    pub master_seed: u64,
    pub trials: Vec<TrialRecord>,
    pub failures: Vec<TrialFailure>,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
    pub stdev: f64,
    pub stdev_convention: String,
    pub mean_time: f64,
    /// Mean best-so-far length per iteration across trials.
    pub avg_trace: Vec<f64>,
    /// Mean current length per iteration, for solvers that report one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avg_current_trace: Option<Vec<f64>>,
}

impl BenchReport {
    /// Folds trial outcomes in trial-index order, whatever order they
    /// arrive in.
    pub fn aggregate(
        spec: &SolverSpec,
        instance: &str,
        metric: Metric,
        master_seed: u64,
        mut outcomes: Vec<TrialOutcome>,
    ) -> Result<Self> {
        outcomes.sort_by_key(|o| match o {
            Ok(r) => r.trial,
            Err(f) => f.trial,
        });
        let (trials, failures): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(|o| o.is_ok());
        let trials: Vec<TrialRecord> = trials.into_iter().map(|o| o.unwrap()).collect();
        let failures: Vec<TrialFailure> = failures.into_iter().map(|o| o.unwrap_err()).collect();

        let lengths: Vec<f64> = trials.iter().map(|t| t.best_length).collect();
        let Some(summary) = summarize(&lengths) else {
            let first = failures.first().map(|f| f.error.clone()).unwrap_or_default();
            return Err(Error::InvalidConfig(format!("every trial failed: {first}")));
        };
        let mean_time = trials.iter().map(|t| t.wall_time).sum::<f64>() / trials.len() as f64;
        let avg_trace = average_series(trials.iter().map(|t| t.trace.as_slice()));
        let avg_current_trace = if trials.iter().all(|t| t.current_trace.is_some()) {
            Some(average_series(trials.iter().filter_map(|t| t.current_trace.as_deref())))
        } else {
            None
        };

        Ok(Self {
            solver: spec.label().to_string(),
            instance: instance.to_string(),
            metric,
            spec: spec.with_seed(master_seed),
            master_seed,
            trials,
            failures,
            best: summary.best,
            mean: summary.mean,
            worst: summary.worst,
            stdev: summary.stdev,
            stdev_convention: STDEV_CONVENTION.to_string(),
            mean_time,
            avg_trace,
            avg_current_trace,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The report as JSON with every timing field removed, for comparing
    /// runs byte for byte.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("mean_time");
            if let Some(trials) = obj.get_mut("trials").and_then(|t| t.as_array_mut()) {
                for t in trials {
                    if let Some(t) = t.as_object_mut() {
                        t.remove("wall_time");
                    }
                }
            }
        }
        Ok(serde_json::to_string_pretty(&value)?)
    }

    /// `iteration,<solver>_avg_fitness` with one row per iteration.
    pub fn trace_csv(&self) -> String {
        trace_csv(&format!("{}_avg_fitness", self.solver), &self.avg_trace)
    }
}

fn trace_csv(column: &str, trace: &[f64]) -> String {
    let mut out = format!("iteration,{column}\n");
    for (i, v) in trace.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, v);
    }
    out
}

/// CSV of a single run's best-so-far trace.
pub fn run_trace_csv(solver: &str, trace: &[f64]) -> String {
    trace_csv(&format!("{solver}_fitness"), trace)
}

pub fn run_trials(
    spec: &SolverSpec,
    instance: &TspInstance,
    n_trials: usize,
    master_seed: u64,
) -> Result<BenchReport> {
    let dmat = instance.distance_matrix();
    run_trials_with_matrix(spec, &instance.name, instance.active_metric, &dmat, n_trials, master_seed)
}

/// Runs `n_trials` independent trials in parallel on a shared matrix.
pub fn run_trials_with_matrix(
    spec: &SolverSpec,
    instance_name: &str,
    metric: Metric,
    dmat: &DistanceMatrix,
    n_trials: usize,
    master_seed: u64,
) -> Result<BenchReport> {
    if n_trials < 1 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    let outcomes: Vec<TrialOutcome> = (0..n_trials)
        .into_par_iter()
        .map(|i| run_trial(spec, dmat, master_seed, i))
        .collect();
    BenchReport::aggregate(spec, instance_name, metric, master_seed, outcomes)
}

/// Subsamples a length-`L` series to `target` points:
/// `out[j] = trace[ceil(j * L / target)]` with 1-based `j`, so the last point
/// is always kept.
pub fn condense_trace(trace: &[f64], target: usize) -> Result<Vec<f64>> {
    let len = trace.len();
    if target == 0 || target > len {
        return Err(Error::InvalidConfig(format!(
            "cannot condense a series of {len} points to {target}"
        )));
    }
    Ok((1..=target).map(|j| trace[(j * len).div_ceil(target) - 1]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCriterion {
    pub epsilon: f64,
    /// Reference optimum `f(x*)`.
    pub reference: f64,
    /// Iterations `k > horizon` (1-based) must stay within `epsilon`.
    pub horizon: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Converged,
    /// First 1-based iteration after the horizon that is farther than
    /// epsilon from the reference.
    Violated { iteration: usize },
}

impl Convergence {
    pub fn is_converged(self) -> bool {
        matches!(self, Convergence::Converged)
    }
}

pub fn check_convergence(trace: &[f64], criterion: &ConvergenceCriterion) -> Convergence {
    trace
        .iter()
        .enumerate()
        .skip(criterion.horizon)
        .find(|(_, &v)| (v - criterion.reference).abs() > criterion.epsilon)
        .map_or(Convergence::Converged, |(i, _)| Convergence::Violated { iteration: i + 1 })
}

/// Smallest horizon `N` for which the trace is `epsilon`-converged to
/// `reference`, or `None` if even the final value is outside the band.
pub fn convergence_horizon(trace: &[f64], reference: f64, epsilon: f64) -> Option<usize> {
    let outside = |v: &f64| (v - reference).abs() > epsilon;
    match trace.iter().rposition(outside) {
        None => Some(0),
        Some(i) if i + 1 == trace.len() => None,
        Some(i) => Some(i + 1),
    }
}

/// Table of summary statistics, one row per report, columns
/// best, mean, worst, st.dev., time(s).
pub fn format_table(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<6} {:>14} {:>14} {:>14} {:>12} {:>10}",
        "instance", "solver", "best", "mean", "worst", "st.dev.", "time(s)"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<16} {:<6} {:>14.4} {:>14.4} {:>14.4} {:>12.4} {:>10.4}",
            r.instance, r.solver, r.best, r.mean, r.worst, r.stdev, r.mean_time
        );
    }
    out
}

/// Merges averaged traces into `iteration,<label>,...`. Every series is
/// condensed to the length of the shortest one.
pub fn merge_traces(columns: &[(&str, &[f64])]) -> Result<String> {
    let target = columns.iter().map(|(_, t)| t.len()).min().unwrap_or(0);
    if target == 0 {
        return Err(Error::InvalidConfig("no trace data to merge".into()));
    }
    let condensed = columns
        .iter()
        .map(|(_, t)| condense_trace(t, target))
        .collect::<Result<Vec<_>>>()?;
    let mut out = String::from("iteration");
    for (label, _) in columns {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for row in 0..target {
        let _ = write!(out, "{}", row + 1);
        for c in &condensed {
            let _ = write!(out, ",{}", c[row]);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value_summary() {
        let s = summarize(&[42.0]).unwrap();
        assert_eq!((s.best, s.mean, s.worst, s.stdev), (42.0, 42.0, 42.0, 0.0));
        assert!(summarize(&[]).is_none());
    }

    #[test]
    fn two_value_summary() {
        let s = summarize(&[10.0, 20.0]).unwrap();
        assert_eq!(s.mean, 15.0);
        assert!((s.stdev - 7.0711).abs() < 1e-4);
        assert!((s.stdev - 50f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn condense_identity_and_stride() {
        let t: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(condense_trace(&t, 10).unwrap(), t);
        let long: Vec<f64> = (1..=4000).map(f64::from).collect();
        let c = condense_trace(&long, 200).unwrap();
        assert_eq!(c.len(), 200);
        assert_eq!(c[0], 20.0);
        assert_eq!(c[1], 40.0);
        assert_eq!(*c.last().unwrap(), 4000.0);
        assert!(condense_trace(&t, 11).is_err());
        assert!(condense_trace(&t, 0).is_err());
        // non-divisible lengths: ceil(j * 10 / 3) = 4, 7, 10
        assert_eq!(condense_trace(&t, 3).unwrap(), vec![4.0, 7.0, 10.0]);
    }

    #[test]
    fn convergence_checks() {
        let flat = vec![5.0; 8];
        let c = ConvergenceCriterion { epsilon: 0.0, reference: 5.0, horizon: 0 };
        assert_eq!(check_convergence(&flat, &c), Convergence::Converged);
        assert_eq!(convergence_horizon(&flat, 5.0, 0.0), Some(0));

        let trace = vec![9.0, 7.0, 6.0, 5.5];
        let c = ConvergenceCriterion { epsilon: 0.1, reference: 5.0, horizon: 1 };
        assert_eq!(check_convergence(&trace, &c), Convergence::Violated { iteration: 2 });
        assert_eq!(convergence_horizon(&trace, 5.0, 0.1), None);

        let trace = vec![9.0, 7.0, 5.0, 5.0];
        assert_eq!(convergence_horizon(&trace, 5.0, 0.0), Some(2));
        let c = ConvergenceCriterion { epsilon: 0.0, reference: 5.0, horizon: 2 };
        assert!(check_convergence(&trace, &c).is_converged());
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| trial_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
    }

    #[test]
    fn merge_condenses_longer_series() {
        let a = [3.0, 2.0];
        let b = [9.0, 8.0, 7.0, 6.0];
        let csv = merge_traces(&[("sta", &a), ("sa", &b)]).unwrap();
        assert_eq!(csv, "iteration,sta,sa\n1,3,8\n2,2,6\n");
    }

    #[test]
    fn spec_json_shape() {
        let spec = SolverSpec::default_for("sa").unwrap();
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(v["solver"], "sa");
        assert_eq!(v["config"]["t0"], 5000.0);
        assert!(SolverSpec::default_for("ga").is_err());
    }
}
