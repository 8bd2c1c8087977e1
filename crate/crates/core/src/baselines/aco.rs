//! Ant System: proportional tour construction, global evaporation, and
//! deposits of `DEPOSIT / L` by every ant on the edges of its tour.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::run::{rng_from_seed, RunResult};
use crate::tour::{DistanceMatrix, Tour};
use crate::tsplib::TspInstance;

/// Lower bound on any trail value.
pub const TAU_MIN: f64 = 1e-12;
/// Pheromone deposited per unit of inverse tour length (Q).
pub const DEPOSIT: f64 = 1.0;
/// Distances below this are treated as this value in the heuristic 1/d.
pub const MIN_DISTANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcoConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Fraction of the trail that survives each iteration.
    pub rho: f64,
    pub ants: usize,
    pub iters: usize,
    pub seed: u64,
    #[serde(default = "default_initial_pheromone")]
    pub initial_pheromone: f64,
}

fn default_initial_pheromone() -> f64 {
    1.0
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 5.0,
            rho: 0.9,
            ants: 20,
            iters: 200,
            seed: 0,
            initial_pheromone: default_initial_pheromone(),
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ants < 1 {
            return Err(Error::InvalidConfig("colony needs at least one ant".into()));
        }
        if self.iters < 1 {
            return Err(Error::InvalidConfig("iteration count must be at least 1".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidConfig(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return Err(Error::InvalidConfig("alpha and beta must be non-negative".into()));
        }
        if !(self.initial_pheromone >= TAU_MIN && self.initial_pheromone.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "initial pheromone must be at least {TAU_MIN}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    n: usize,
    tau: Vec<f64>,
}

impl PheromoneMatrix {
    pub fn uniform(n: usize, value: f64) -> Self {
        Self { n, tau: vec![value.max(TAU_MIN); n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    pub fn max(&self) -> f64 {
        self.tau.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.tau.iter().copied().fold(f64::MAX, f64::min)
    }

    fn update_in_place<'a>(&mut self, colony: impl IntoIterator<Item = (&'a [usize], f64)>, rho: f64) {
        let n = self.n;
        for t in &mut self.tau {
            *t *= rho;
        }
        for (order, length) in colony {
            let amount = DEPOSIT / length;
            for k in 0..order.len() {
                let a = order[k];
                let b = order[(k + 1) % order.len()];
                self.tau[a * n + b] += amount;
                self.tau[b * n + a] += amount;
            }
        }
        for t in &mut self.tau {
            *t = t.max(TAU_MIN);
        }
    }
}

/// Per-edge attractiveness `tau^alpha * (1/d)^beta`.
fn edge_weights(pheromone: &PheromoneMatrix, dmat: &DistanceMatrix, alpha: f64, beta: f64) -> Vec<f64> {
    let n = dmat.n();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let eta = 1.0 / dmat.get(i, j).max(MIN_DISTANCE);
                w[i * n + j] = pheromone.get(i, j).powf(alpha) * eta.powf(beta);
            }
        }
    }
    w
}

fn construct<R: Rng + ?Sized>(weights: &[f64], n: usize, rng: &mut R) -> Vec<usize> {
    let mut unvisited: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let start = rng.random_range(0..n);
    unvisited.remove(start);
    order.push(start);
    let mut current = start;

    while !unvisited.is_empty() {
        let row = &weights[current * n..(current + 1) * n];
        let total: f64 = unvisited.iter().map(|&j| row[j]).sum();
        let pick = if total > 0.0 && total.is_finite() {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = unvisited.len() - 1;
            for (k, &j) in unvisited.iter().enumerate() {
                r -= row[j];
                if r < 0.0 {
                    chosen = k;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..unvisited.len())
        };
        // `remove` keeps `unvisited` sorted so draws do not depend on history.
        current = unvisited.remove(pick);
        order.push(current);
    }
    order
}

/// Builds one ant's tour: uniform random start, then each next node `j`
/// chosen among the unvisited with probability proportional to
/// `tau(i,j)^alpha * (1/d(i,j))^beta`.
pub fn aco_construct_tour<R: Rng + ?Sized>(
    pheromone: &PheromoneMatrix,
    dmat: &DistanceMatrix,
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Result<Tour> {
    if pheromone.n() != dmat.n() {
        return Err(Error::DimensionMismatch { expected: dmat.n(), found: pheromone.n() });
    }
    let weights = edge_weights(pheromone, dmat, alpha, beta);
    Ok(Tour::from_vec_unchecked(construct(&weights, dmat.n(), rng)))
}

/// `tau <- rho * tau + sum over ants of DEPOSIT / L` on each edge of the
/// ant's tour (both directions), then floored at [`TAU_MIN`].
pub fn aco_update_pheromone(
    pheromone: &PheromoneMatrix,
    colony: &[(Tour, f64)],
    rho: f64,
) -> Result<PheromoneMatrix> {
    if let Some((t, _)) = colony.iter().find(|(t, _)| t.len() != pheromone.n()) {
        return Err(Error::DimensionMismatch { expected: pheromone.n(), found: t.len() });
    }
    let mut next = pheromone.clone();
    next.update_in_place(colony.iter().map(|(t, l)| (t.order(), *l)), rho);
    Ok(next)
}

pub fn aco_solve(instance: &TspInstance, config: &AcoConfig) -> Result<RunResult> {
    aco_solve_matrix(&instance.distance_matrix(), config)
}

pub fn aco_solve_matrix(dmat: &DistanceMatrix, config: &AcoConfig) -> Result<RunResult> {
    config.validate()?;
    let n = dmat.n();
    if n < 3 {
        return Err(Error::InvalidConfig(format!("a tour needs at least 3 nodes, got {n}")));
    }
    let clock = Instant::now();
    let mut rng = rng_from_seed(config.seed);
    let mut pheromone = PheromoneMatrix::uniform(n, config.initial_pheromone);

    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut evals = 0u64;
    let mut trace = Vec::with_capacity(config.iters);
    let mut colony: Vec<(Vec<usize>, f64)> = Vec::with_capacity(config.ants);

    for _ in 0..config.iters {
        let weights = edge_weights(&pheromone, dmat, config.alpha, config.beta);
        colony.clear();
        for _ in 0..config.ants {
            let order = construct(&weights, n, &mut rng);
            let len = dmat.cycle_length(&order);
            evals += 1;
            if best.as_ref().is_none_or(|(_, b)| len < *b) {
                best = Some((order.clone(), len));
            }
            colony.push((order, len));
        }
        pheromone.update_in_place(colony.iter().map(|(o, l)| (o.as_slice(), *l)), config.rho);
        trace.push(best.as_ref().map(|(_, l)| *l).unwrap_or(f64::INFINITY));
    }

    let (order, best_len) = best.expect("at least one ant ran");
    Ok(RunResult {
        best_tour: Tour::from_vec_unchecked(order),
        best_length: best_len,
        trace,
        current_trace: None,
        eval_count: evals,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tour::{tour_length, validate_tour};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn points(pts: &[(f64, f64)]) -> DistanceMatrix {
        DistanceMatrix::from_fn(pts.len(), |i, j| {
            ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
        })
    }

    fn random_dmat(n: usize, seed: u64) -> DistanceMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        points(&pts)
    }

    #[test]
    fn three_nodes() {
        let dmat = points(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        let cfg = AcoConfig { iters: 1, ants: 3, ..Default::default() };
        let res = aco_solve_matrix(&dmat, &cfg).unwrap();
        let perimeter = 2.0 + 2f64.sqrt();
        assert!((res.trace[0] - perimeter).abs() < 1e-12);
        assert_eq!(res.eval_count, 3);
    }

    #[test]
    fn uniform_trail_without_heuristic_is_uniform() {
        // Next node after the start is uniform over the n-1 others.
        let n = 5;
        let dmat = random_dmat(n, 3);
        let pher = PheromoneMatrix::uniform(n, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let draws = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            let t = aco_construct_tour(&pher, &dmat, 1.0, 0.0, &mut rng).unwrap();
            let o = t.order();
            counts[(o[1] + n - o[0]) % n - 1] += 1;
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 3 degrees of freedom, 0.1% critical value
        assert!(chi2 < 16.27, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn strong_heuristic_is_nearest_neighbour() {
        // Gaps double along a line, so the nearer side always wins by a
        // factor >= 2 and beta = 60 makes the choice effectively greedy.
        let xs: Vec<(f64, f64)> = (0..9).map(|k| ((1u32 << k) as f64 - 1.0, 0.0)).collect();
        let dmat = points(&xs);
        let pher = PheromoneMatrix::uniform(xs.len(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let t = aco_construct_tour(&pher, &dmat, 0.0, 60.0, &mut rng).unwrap();
            let o = t.order();
            // direct nearest-neighbour construction from the same start
            let mut nn = vec![o[0]];
            while nn.len() < xs.len() {
                let cur = *nn.last().unwrap();
                let next = (0..xs.len())
                    .filter(|j| !nn.contains(j))
                    .min_by(|&a, &b| dmat.get(cur, a).total_cmp(&dmat.get(cur, b)))
                    .unwrap();
                nn.push(next);
            }
            assert_eq!(o, nn.as_slice());
        }
    }

    #[test]
    fn update_without_ants_is_pure_decay() {
        let pher = PheromoneMatrix::uniform(4, 0.3);
        let next = aco_update_pheromone(&pher, &[], 0.9).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(next.get(i, j), 0.9 * 0.3);
            }
        }
    }

    #[test]
    fn single_ant_deposit() {
        let dmat = random_dmat(6, 9);
        let pher = PheromoneMatrix::uniform(6, 0.2);
        let tour = Tour::from_one_based(&[1, 3, 5, 2, 6, 4]).unwrap();
        let len = tour_length(&tour, &dmat).unwrap();
        let next = aco_update_pheromone(&pher, &[(tour, len)], 0.9).unwrap();
        // edge 3-5 is used; edge 1-2 is not
        assert_eq!(next.get(2, 4), 0.9 * 0.2 + 1.0 / len);
        assert_eq!(next.get(4, 2), next.get(2, 4));
        assert_eq!(next.get(0, 1), 0.9 * 0.2);
    }

    #[test]
    fn decay_stops_at_floor() {
        let mut pher = PheromoneMatrix::uniform(4, 1.0);
        let mut prev = pher.max();
        for _ in 0..400 {
            pher = aco_update_pheromone(&pher, &[], 0.9).unwrap();
            assert!(pher.min() >= TAU_MIN);
            assert!(pher.max() <= prev);
            prev = pher.max();
        }
        assert_eq!(pher.max(), TAU_MIN);
    }

    #[test]
    fn update_rejects_mismatched_tour() {
        let pher = PheromoneMatrix::uniform(4, 1.0);
        assert!(aco_update_pheromone(&pher, &[(Tour::identity(5), 1.0)], 0.9).is_err());
    }

    #[test]
    fn run_is_monotone_valid_and_deterministic() {
        let dmat = random_dmat(15, 4);
        let cfg = AcoConfig { iters: 30, ants: 8, seed: 5, ..Default::default() };
        let a = aco_solve_matrix(&dmat, &cfg).unwrap();
        let b = aco_solve_matrix(&dmat, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best_tour, b.best_tour);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(validate_tour(a.best_tour.order(), 15).is_ok());
        assert_eq!(tour_length(&a.best_tour, &dmat).unwrap(), a.best_length);
        assert_eq!(a.eval_count, 30 * 8);
    }

    #[test]
    fn rejects_bad_config() {
        let dmat = random_dmat(5, 1);
        for cfg in [
            AcoConfig { ants: 0, ..Default::default() },
            AcoConfig { iters: 0, ..Default::default() },
            AcoConfig { rho: 1.0, ..Default::default() },
            AcoConfig { alpha: -1.0, ..Default::default() },
            AcoConfig { initial_pheromone: 0.0, ..Default::default() },
        ] {
            assert!(aco_solve_matrix(&dmat, &cfg).is_err());
        }
    }
}
