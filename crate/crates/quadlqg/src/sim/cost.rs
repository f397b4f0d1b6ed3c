use crate::riccati::LqgWeights;

use super::trajectory::{trapezoid, Trajectory};

/// Base cost assigned to a diverged run; the remaining-time term keeps the
/// ranking sensitive to how early the loop fell apart.
pub const DIVERGENCE_PENALTY: f64 = 1e9;

/// Penalty for a run that diverged at `t_div` out of `horizon` seconds.
pub fn divergence_penalty(horizon: f64, t_div: f64) -> f64 {
    DIVERGENCE_PENALTY + (horizon - t_div).max(0.0)
}

fn step_of(traj: &Trajectory) -> f64 {
    if traj.len() > 1 {
        traj.time[1] - traj.time[0]
    } else {
        0.0
    }
}

/// Time-averaged quadratic regulation cost,
/// (1/T) ∫ (Δxᵀ Q Δx + Δuᵀ R Δu) dt, with deviations taken from the
/// equilibrium. Diverged runs score the divergence penalty.
pub fn inner_cost(traj: &Trajectory, weights: &LqgWeights) -> f64 {
    if traj.diverged {
        return divergence_penalty(traj.horizon, traj.divergence_time.unwrap_or(0.0));
    }
    if traj.len() < 2 {
        return 0.0;
    }
    let samples: Vec<f64> = (0..traj.len())
        .map(|i| {
            let dx = traj.states[i] - traj.reference;
            let du = traj.controls[i] - traj.input_reference;
            (dx.transpose() * weights.q * dx)[(0, 0)] + (du.transpose() * weights.r * du)[(0, 0)]
        })
        .collect();
    let span = traj.time[traj.len() - 1] - traj.time[0];
    trapezoid(&samples, step_of(traj)) / span
}

/// Hover-holding outer cost, ∫ (‖ε̂_ξ‖ + λ‖ε̂_η‖) dt over the horizon, with
/// ε̂ = x̂ − x_ref. Diverged runs score the divergence penalty.
pub fn outer_cost(traj: &Trajectory, lambda: f64) -> f64 {
    if traj.diverged {
        return divergence_penalty(traj.horizon, traj.divergence_time.unwrap_or(0.0));
    }
    let dt = step_of(traj);
    let pos: Vec<f64> = (0..traj.len())
        .map(|i| traj.control_error(i).fixed_rows::<3>(0).norm())
        .collect();
    let att: Vec<f64> = (0..traj.len())
        .map(|i| traj.control_error(i).fixed_rows::<3>(6).norm())
        .collect();
    trapezoid(&pos, dt) + lambda * trapezoid(&att, dt)
}

/// The outer cost as accumulated sample-by-sample during the rollout.
pub fn online_outer_cost(traj: &Trajectory, lambda: f64) -> f64 {
    if traj.diverged {
        return divergence_penalty(traj.horizon, traj.divergence_time.unwrap_or(0.0));
    }
    traj.online_position_integral + lambda * traj.online_attitude_integral
}
