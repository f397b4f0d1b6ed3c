//! Nonlinear quadrotor plant model, rotor mixing, hover equilibrium, and
//! linearization about it.

mod linearize;
mod model;
mod types;

pub use linearize::{linearize, output_matrix};
pub use model::{
    dynamics_derivative, dynamics_derivative_vec, euler_rate_matrix, hover_equilibrium,
    inverse_mixing, mixing_matrix, motor_mixing, rotation_matrix, ATTITUDE_GUARD,
};
pub use types::{
    Control4, Equilibrium, InputMatrix, InputVector, LinearModel, OutputMatrix, QuadrotorParams,
    State12, StateMatrix, StateVector, INPUT_DIM, MEAS_DIM, STATE_DIM,
};
