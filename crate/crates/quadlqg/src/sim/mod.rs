//! Seeded stochastic closed-loop simulation, disturbance injection, cost
//! evaluation, and flight metrics.

mod config;
mod cost;
mod covariance;
mod metrics;
mod simulate;
mod trajectory;

pub use config::{DisturbanceKind, DisturbanceSpec, PlantModel, SimConfig};
pub use cost::{divergence_penalty, inner_cost, online_outer_cost, outer_cost, DIVERGENCE_PENALTY};
pub use covariance::propagate_covariance;
pub use metrics::{compute_metrics, RunMetrics, METRICS_SCHEMA};
pub use simulate::{simulate, DIVERGENCE_THRESHOLD};
pub use trajectory::{Trajectory, TRAJECTORY_CSV_SCHEMA};
