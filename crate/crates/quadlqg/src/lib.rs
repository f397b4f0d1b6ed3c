//! LQG synthesis and black-box weight tuning for a hovering quadrotor.
//!
//! The crate is organized around four layers:
//!
//! - [`dynamics`]: the Newton–Euler plant model, rotor mixing, hover
//!   equilibrium, and its exact linearization;
//! - [`riccati`]: continuous algebraic Riccati / Lyapunov solvers producing
//!   LQR and Kalman gains, plus the Cholesky weight parameterization;
//! - [`sim`]: seeded stochastic closed-loop simulation with gust disturbance
//!   injection, cost evaluation, and flight metrics;
//! - [`tuner`]: gradient-free outer-loop optimization of the 88-dimensional
//!   weight vector (CMA-ES, particle swarm, genetic algorithm, Bryson's rule,
//!   and a fixed manual baseline), plus a 2-d cost-landscape scanner.

pub mod dynamics;
pub mod riccati;
pub mod sim;
pub mod tuner;

mod error;

pub use error::{Error, Result};
