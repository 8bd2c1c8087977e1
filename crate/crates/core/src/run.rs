use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::tour::Tour;

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_tour: Tour,
    pub best_length: f64,
    /// Best-so-far length after each iteration.
    pub trace: Vec<f64>,
    /// Length of the current (not necessarily best) solution after each
    /// iteration, for solvers that can move uphill.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_trace: Option<Vec<f64>>,
    /// Number of tour-length evaluations performed.
    pub eval_count: u64,
    /// Seconds.
    pub wall_time: f64,
}

/// The random stream used for a run seeded with `seed`.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
