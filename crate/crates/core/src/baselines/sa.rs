use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::run::{rng_from_seed, RunResult};
use crate::tour::{random_tour, DistanceMatrix, Tour};
use crate::tsplib::TspInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub t0: f64,
    /// Geometric factor applied to the temperature once per iteration.
    pub cooling: f64,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self { t0: 5000.0, cooling: 0.97, iters: 4000, seed: 0 }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidConfig(format!("t0 must be positive, got {}", self.t0)));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cooling rate must lie in (0, 1), got {}",
                self.cooling
            )));
        }
        if self.iters < 1 {
            return Err(Error::InvalidConfig("iteration count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Metropolis rule: 1 for non-worsening moves, `exp(-delta / t)` otherwise.
pub fn acceptance_probability(delta: f64, temperature: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else if temperature <= 0.0 {
        0.0
    } else {
        (-delta / temperature).exp()
    }
}

pub fn sa_solve(instance: &TspInstance, config: &SaConfig) -> Result<RunResult> {
    sa_solve_matrix(&instance.distance_matrix(), config)
}

/// One proposal per iteration: exchange two random positions of the
/// current tour.
pub fn sa_solve_matrix(dmat: &DistanceMatrix, config: &SaConfig) -> Result<RunResult> {
    config.validate()?;
    let clock = Instant::now();
    let mut rng = rng_from_seed(config.seed);
    let n = dmat.n();

    let mut current = random_tour(n, &mut rng)?.into_inner();
    let mut current_len = dmat.cycle_length(&current);
    let mut best = current.clone();
    let mut best_len = current_len;
    let mut evals = 1u64;
    let mut temperature = config.t0;

    let mut trace = Vec::with_capacity(config.iters);
    let mut current_trace = Vec::with_capacity(config.iters);
    let mut candidate = current.clone();
    for _ in 0..config.iters {
        let pair = index::sample(&mut rng, n, 2);
        candidate.copy_from_slice(&current);
        candidate.swap(pair.index(0), pair.index(1));
        let len = dmat.cycle_length(&candidate);
        evals += 1;

        let delta = len - current_len;
        if delta < 0.0 || rng.random::<f64>() < acceptance_probability(delta, temperature) {
            std::mem::swap(&mut current, &mut candidate);
            current_len = len;
            if current_len < best_len {
                best.copy_from_slice(&current);
                best_len = current_len;
            }
        }
        temperature *= config.cooling;
        trace.push(best_len);
        current_trace.push(current_len);
    }

    Ok(RunResult {
        best_tour: Tour::from_vec_unchecked(best),
        best_length: best_len,
        trace,
        current_trace: Some(current_trace),
        eval_count: evals,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::tour_length;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize, seed: u64) -> DistanceMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        DistanceMatrix::from_fn(n, |i, j| {
            ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
        })
    }

    #[test]
    fn acceptance_limits() {
        assert_eq!(acceptance_probability(-1.0, 1.0), 1.0);
        assert!(acceptance_probability(10.0, 1e12) > 1.0 - 1e-10);
        assert!(acceptance_probability(10.0, 1e-300) < 1e-300);
        assert_eq!(acceptance_probability(10.0, 0.0), 0.0);
        assert!((acceptance_probability(2.0, 4.0) - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn traces_and_budget() {
        let dmat = ring(25, 4);
        let cfg = SaConfig { iters: 600, t0: 5.0, seed: 8, ..Default::default() };
        let res = sa_solve_matrix(&dmat, &cfg).unwrap();
        assert_eq!(res.eval_count, 601);
        assert_eq!(res.trace.len(), 600);
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
        let current = res.current_trace.as_ref().unwrap();
        assert!(current.iter().zip(&res.trace).all(|(c, b)| b <= c));
        // A hot start accepts uphill moves, so the raw series goes up somewhere.
        assert!(current.windows(2).any(|w| w[1] > w[0]));
        assert_eq!(tour_length(&res.best_tour, &dmat).unwrap(), res.best_length);
    }

    #[test]
    fn rejects_bad_config() {
        let dmat = ring(5, 1);
        for cfg in [
            SaConfig { t0: 0.0, ..Default::default() },
            SaConfig { cooling: 1.0, ..Default::default() },
            SaConfig { cooling: 0.0, ..Default::default() },
            SaConfig { iters: 0, ..Default::default() },
        ] {
            assert!(sa_solve_matrix(&dmat, &cfg).is_err());
        }
    }
}
