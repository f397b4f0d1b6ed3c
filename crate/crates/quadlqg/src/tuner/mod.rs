//! Outer-loop black-box optimization of the LQG weight parameterization:
//! CMA-ES, particle swarm, genetic algorithm, Bryson's rule, a manual
//! baseline, and the 2-d cost-landscape scanner.

mod bryson;
mod cma;
mod ga;
mod landscape;
mod objective;
mod pso;
mod tune;

pub use bryson::{brysons_rule, BrysonDeviations};
pub use cma::{scales_from_warm_start, CmaParams, CmaState, EIGEN_FLOOR};
pub use ga::{GaParams, GaState};
pub use landscape::{count_grid_local_minima, landscape_scan, log_grid, LandscapePoint};
pub use objective::{evaluate_candidate, ObjectiveFn, TuningContext};
pub use pso::{PsoParams, PsoState};
pub use tune::{tune, GenerationStat, Method, OptimizerConfig, TuneResult, TuneRunner};
