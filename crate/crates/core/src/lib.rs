//! Discrete state transition algorithm (STA) for the symmetric traveling
//! salesman problem.
//!
//! The search keeps one incumbent tour and repeatedly runs three phases,
//! swap, shift and symmetry, each sampling a batch of transformed copies of
//! the incumbent and keeping the best one only if it is strictly shorter.
//! Simulated annealing and an ant system are included as baselines, along
//! with a TSPLIB reader and a seeded multi-trial benchmark harness.

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod operators;
pub mod run;
pub mod sta;
pub mod tour;
pub mod tsplib;

pub use error::{Error, Result};
pub use operators::{Move, OperatorKind, OperatorParams, PermutationMatrix};
pub use run::RunResult;
pub use sta::{sta_solve, sta_solve_matrix, StaConfig};
pub use tour::{tour_length, DistanceMatrix, Tour};
pub use tsplib::{parse_instance, Metric, TspInstance};
