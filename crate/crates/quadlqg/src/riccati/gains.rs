use nalgebra::{DMatrix, SMatrix};
use serde::{Deserialize, Serialize};

use crate::dynamics::{LinearModel, INPUT_DIM, MEAS_DIM, STATE_DIM};
use crate::error::Result;

use super::care::{solve_care, solve_kalman};
use super::weights::LqgWeights;

pub type GainMatrix = SMatrix<f64, INPUT_DIM, STATE_DIM>;
pub type KalmanMatrix = SMatrix<f64, STATE_DIM, MEAS_DIM>;
pub type ClosedLoopMatrix = SMatrix<f64, { 2 * STATE_DIM }, { 2 * STATE_DIM }>;

/// LQR and Kalman gains with their Riccati solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqgGains {
    /// State-feedback gain: u = u_e − K(x̂ − x_ref).
    pub k: GainMatrix,
    /// Innovation gain of the state estimator.
    pub l: KalmanMatrix,
    pub p_ctrl: SMatrix<f64, STATE_DIM, STATE_DIM>,
    pub p_est: SMatrix<f64, STATE_DIM, STATE_DIM>,
}

pub(crate) fn to_dyn<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> DMatrix<f64> {
    DMatrix::from_column_slice(R, C, m.as_slice())
}

fn to_static<const R: usize, const C: usize>(m: &DMatrix<f64>) -> SMatrix<f64, R, C> {
    SMatrix::from_column_slice(m.as_slice())
}

/// Solves both Riccati equations for a model/weight pair.
pub fn synthesize_gains(model: &LinearModel, weights: &LqgWeights) -> Result<LqgGains> {
    let a = to_dyn(&model.a);
    let b = to_dyn(&model.b);
    let c = to_dyn(&model.c);

    let ctrl = solve_care(&a, &b, &to_dyn(&weights.q), &to_dyn(&weights.r))?;
    let (p_est, l) = solve_kalman(&a, &c, &to_dyn(&weights.w), &to_dyn(&weights.v))?;

    Ok(LqgGains {
        k: to_static(&ctrl.gain),
        l: to_static(&l),
        p_ctrl: to_static(&ctrl.p),
        p_est: to_static(&p_est),
    })
}

/// Block matrix of the joint (state, estimation-error) dynamics,
/// [[A−BK, BK], [0, A−LC]]. Its upper-triangular structure is what makes the
/// controller and estimator spectra separate.
pub fn closed_loop_matrix(model: &LinearModel, gains: &LqgGains) -> ClosedLoopMatrix {
    let a_ctrl = model.a - model.b * gains.k;
    let bk = model.b * gains.k;
    let a_est = model.a - gains.l * model.c;

    let mut cl = ClosedLoopMatrix::zeros();
    cl.fixed_view_mut::<STATE_DIM, STATE_DIM>(0, 0).copy_from(&a_ctrl);
    cl.fixed_view_mut::<STATE_DIM, STATE_DIM>(0, STATE_DIM).copy_from(&bk);
    cl.fixed_view_mut::<STATE_DIM, STATE_DIM>(STATE_DIM, STATE_DIM).copy_from(&a_est);
    cl
}
