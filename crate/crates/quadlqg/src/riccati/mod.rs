//! Continuous algebraic Riccati and Lyapunov solvers, LQG gain synthesis,
//! and the Cholesky parameterization of the weight matrices.

mod care;
mod gains;
pub(crate) mod lyapunov;
mod schur;
mod weights;

pub use care::{solve_care, solve_kalman, CareSolution, IMAG_AXIS_TOL};
pub use gains::{closed_loop_matrix, synthesize_gains, ClosedLoopMatrix, GainMatrix, KalmanMatrix, LqgGains};
pub use lyapunov::{solve_lyapunov, spectral_abscissa};
pub use weights::{
    default_measurement_noise, default_process_noise, identity_params, params_from_weights,
    weights_from_params, LqgWeights, QMatrix, RMatrix, VMatrix, DIAG_FLOOR, PARAM_DIM, Q_TRI_DIM,
    R_TRI_DIM,
};
