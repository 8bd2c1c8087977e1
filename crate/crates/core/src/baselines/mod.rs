//! Comparison solvers: simulated annealing and the ant system.

mod aco;
mod sa;

pub use aco::{
    aco_construct_tour, aco_solve, aco_solve_matrix, aco_update_pheromone, AcoConfig,
    PheromoneMatrix, DEPOSIT, MIN_DISTANCE, TAU_MIN,
};
pub use sa::{acceptance_probability, sa_solve, sa_solve_matrix, SaConfig};
