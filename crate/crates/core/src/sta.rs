//! The discrete state transition algorithm.
//!
//! Each outer iteration runs three phases in order: swap, shift, symmetry.
//! A phase samples `search_enforcement` candidates from the incumbent,
//! evaluates all of them, and replaces the incumbent by the best candidate
//! only if it is strictly shorter.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{OperatorKind, OperatorParams};
use crate::run::{rng_from_seed, RunResult};
use crate::tour::{random_tour, DistanceMatrix, Tour};
use crate::tsplib::TspInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaConfig {
    /// Candidates sampled per phase (SE).
    pub search_enforcement: usize,
    /// Outer iterations (M).
    pub max_iters: usize,
    pub params: OperatorParams,
    pub seed: u64,
    /// Optional wall-clock cap in seconds. Runs that hit it stop early and
    /// are no longer reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_secs: Option<f64>,
}

impl Default for StaConfig {
    fn default() -> Self {
        Self {
            search_enforcement: 20,
            max_iters: 200,
            params: OperatorParams::default(),
            seed: 0,
            time_limit_secs: None,
        }
    }
}

impl StaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.search_enforcement < 1 {
            return Err(Error::InvalidConfig("search enforcement must be at least 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("iteration count must be at least 1".into()));
        }
        if let Some(t) = self.time_limit_secs {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::InvalidConfig(format!("time limit must be positive, got {t}")));
            }
        }
        self.params.validate()
    }
}

/// Incumbent plus scratch buffers reused across phases.
struct Search<'a> {
    dmat: &'a DistanceMatrix,
    best: Vec<usize>,
    best_len: f64,
    candidate: Vec<usize>,
    phase_best: Vec<usize>,
    evals: u64,
}

impl<'a> Search<'a> {
    fn new(dmat: &'a DistanceMatrix, start: Vec<usize>, start_len: f64) -> Self {
        let n = start.len();
        Self {
            dmat,
            best: start,
            best_len: start_len,
            candidate: Vec::with_capacity(n),
            phase_best: Vec::with_capacity(n),
            evals: 0,
        }
    }

    fn phase<R: Rng + ?Sized>(
        &mut self,
        kind: OperatorKind,
        params: &OperatorParams,
        se: usize,
        rng: &mut R,
    ) -> Result<()> {
        let n = self.best.len();
        let mut phase_len = f64::INFINITY;
        for _ in 0..se {
            let mv = kind.sample(n, params, rng)?;
            mv.apply_into(&self.best, &mut self.candidate);
            let len = self.dmat.cycle_length(&self.candidate);
            self.evals += 1;
            if len < phase_len {
                phase_len = len;
                std::mem::swap(&mut self.phase_best, &mut self.candidate);
            }
        }
        if phase_len < self.best_len {
            std::mem::swap(&mut self.best, &mut self.phase_best);
            self.best_len = phase_len;
        }
        Ok(())
    }
}

/// Result of a single operator phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    pub tour: Tour,
    pub length: f64,
    pub evaluations: u64,
}

/// Runs one phase of `se` candidates drawn from `incumbent` with the
/// sampler of `kind`, keeping the incumbent unless the best candidate is
/// strictly shorter.
pub fn operator_phase<R: Rng + ?Sized>(
    incumbent: &Tour,
    incumbent_length: f64,
    kind: OperatorKind,
    params: &OperatorParams,
    se: usize,
    dmat: &DistanceMatrix,
    rng: &mut R,
) -> Result<PhaseOutcome> {
    if incumbent.len() != dmat.n() {
        return Err(Error::DimensionMismatch { expected: dmat.n(), found: incumbent.len() });
    }
    if se < 1 {
        return Err(Error::InvalidConfig("search enforcement must be at least 1".into()));
    }
    let mut search = Search::new(dmat, incumbent.order().to_vec(), incumbent_length);
    search.phase(kind, params, se, rng)?;
    Ok(PhaseOutcome {
        tour: Tour::from_vec_unchecked(search.best),
        length: search.best_len,
        evaluations: search.evals,
    })
}

pub fn sta_solve(instance: &TspInstance, config: &StaConfig) -> Result<RunResult> {
    sta_solve_matrix(&instance.distance_matrix(), config)
}

/// Runs the algorithm on a prebuilt distance matrix. The initial tour is a
/// uniformly random permutation drawn from the run's random stream.
pub fn sta_solve_matrix(dmat: &DistanceMatrix, config: &StaConfig) -> Result<RunResult> {
    config.validate()?;
    let clock = Instant::now();
    let limit = config.time_limit_secs.map(Duration::from_secs_f64);
    let mut rng = rng_from_seed(config.seed);

    let start = random_tour(dmat.n(), &mut rng)?.into_inner();
    let start_len = dmat.cycle_length(&start);
    let mut search = Search::new(dmat, start, start_len);
    search.evals = 1;

    let mut trace = Vec::with_capacity(config.max_iters.min(1 << 16));
    for iter in 0..config.max_iters {
        if iter > 0 && limit.is_some_and(|l| clock.elapsed() >= l) {
            break;
        }
        for kind in OperatorKind::PHASES {
            let before = search.best_len;
            search.phase(kind, &config.params, config.search_enforcement, &mut rng)?;
            debug_assert!(search.best_len <= before);
        }
        trace.push(search.best_len);
    }

    Ok(RunResult {
        best_tour: Tour::from_vec_unchecked(search.best),
        best_length: search.best_len,
        trace,
        current_trace: None,
        eval_count: search.evals,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}
