use serde::{Deserialize, Serialize};

use crate::riccati::LqgWeights;

use super::cost::{inner_cost, outer_cost};
use super::trajectory::{trapezoid, Trajectory};

/// Schema tag for metric CSV/JSON artifacts.
pub const METRICS_SCHEMA: &str = "metrics-v1";

const RAD_TO_DEG: f64 = 180.0 / std::f64::consts::PI;

/// Scalar performance summary of one rollout. Attitude figures are reported
/// in degrees; everything internal stays in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub diverged: bool,
    pub divergence_time: Option<f64>,
    /// Time-averaged quadratic regulation cost.
    pub j_in: f64,
    /// Integrated hover-holding cost (position + λ·attitude error).
    pub j_out: f64,
    /// ‖e_ξ(T)‖: final-time position estimation error [m].
    pub final_est_pos_err: f64,
    /// ‖ε̂_ξ(T)‖: final-time position control error [m].
    pub final_ctrl_pos_err: f64,
    /// ‖e_η(T)‖: final-time attitude estimation error [deg].
    pub final_est_att_err_deg: f64,
    /// ‖ε̂_η(T)‖: final-time attitude control error [deg].
    pub final_ctrl_att_err_deg: f64,
    /// ∫‖u‖₁ dt, gravity-balancing channel included [N·s].
    pub control_effort: f64,
    /// ∫‖u − u_e‖₁ dt, deviation-only variant [N·s].
    pub control_effort_deviation: f64,
    /// ∫ u_z dt [N·s]; proxy for energy drawn by the rotors.
    pub energy_proxy: f64,
    /// First time after which the position error stays inside 2% of its peak.
    pub settling_time: f64,
    /// Rebound past the hold point, % of the peak position error.
    pub overshoot_pct: f64,
    /// Largest single-rotor thrust command seen [N].
    pub peak_actuator: f64,
    /// RMS of ‖e_ξ(t)‖ over the run [m].
    pub estimation_rmse: f64,
    /// RMS of the true position tracking error ‖x_ξ − x_ref‖ [m].
    pub position_rmse: f64,
    /// RMS of the true attitude tracking error [deg].
    pub attitude_rmse_deg: f64,
}

impl RunMetrics {
    pub fn csv_header() -> String {
        [
            "diverged",
            "divergence_time",
            "j_in",
            "j_out",
            "final_est_pos_err",
            "final_ctrl_pos_err",
            "final_est_att_err_deg",
            "final_ctrl_att_err_deg",
            "control_effort",
            "control_effort_deviation",
            "energy_proxy",
            "settling_time",
            "overshoot_pct",
            "peak_actuator",
            "estimation_rmse",
            "position_rmse",
            "attitude_rmse_deg",
        ]
        .join(",")
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            if self.diverged { 1 } else { 0 },
            self.divergence_time.map_or(String::from(""), |t| t.to_string()),
            self.j_in,
            self.j_out,
            self.final_est_pos_err,
            self.final_ctrl_pos_err,
            self.final_est_att_err_deg,
            self.final_ctrl_att_err_deg,
            self.control_effort,
            self.control_effort_deviation,
            self.energy_proxy,
            self.settling_time,
            self.overshoot_pct,
            self.peak_actuator,
            self.estimation_rmse,
            self.position_rmse,
            self.attitude_rmse_deg,
        )
    }
}

fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// Settling time against a 2% band of the series peak: the first grid time
/// after which the signal never leaves the band again.
fn settling_time(time: &[f64], signal: &[f64]) -> f64 {
    let peak = signal.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return 0.0;
    }
    let band = 0.02 * peak;
    let mut settled_from = time.len();
    for i in (0..signal.len()).rev() {
        if signal[i] > band {
            break;
        }
        settled_from = i;
    }
    if settled_from >= time.len() {
        *time.last().unwrap_or(&0.0)
    } else {
        time[settled_from]
    }
}

/// Rebound ratio: how far the position error swings past the hold point, as a
/// percentage of the peak, measured along the peak-error direction.
fn overshoot_pct(traj: &Trajectory) -> f64 {
    let mut peak = 0.0;
    let mut peak_idx = 0;
    for i in 0..traj.len() {
        let n = traj.control_error(i).fixed_rows::<3>(0).norm();
        if n > peak {
            peak = n;
            peak_idx = i;
        }
    }
    if peak <= 0.0 {
        return 0.0;
    }
    let direction = traj.control_error(peak_idx).fixed_rows::<3>(0) / peak;
    let mut min_proj: f64 = 0.0;
    for i in peak_idx..traj.len() {
        let proj = traj.control_error(i).fixed_rows::<3>(0).dot(&direction);
        min_proj = min_proj.min(proj);
    }
    100.0 * (-min_proj).max(0.0) / peak
}

/// Fills every summary field from a completed rollout.
pub fn compute_metrics(traj: &Trajectory, weights: &LqgWeights, lambda: f64) -> RunMetrics {
    let n = traj.len();
    let dt = if n > 1 { traj.time[1] - traj.time[0] } else { 0.0 };
    let last = n.saturating_sub(1);

    let est_pos: Vec<f64> =
        (0..n).map(|i| traj.estimation_error(i).fixed_rows::<3>(0).norm()).collect();
    let ctrl_pos: Vec<f64> =
        (0..n).map(|i| traj.control_error(i).fixed_rows::<3>(0).norm()).collect();
    let track_pos: Vec<f64> =
        (0..n).map(|i| traj.tracking_error(i).fixed_rows::<3>(0).norm()).collect();
    let track_att: Vec<f64> =
        (0..n).map(|i| traj.tracking_error(i).fixed_rows::<3>(6).norm()).collect();

    let abs_u: Vec<f64> = (0..n).map(|i| traj.controls[i].iter().map(|v| v.abs()).sum()).collect();
    let abs_du: Vec<f64> = (0..n)
        .map(|i| (traj.controls[i] - traj.input_reference).iter().map(|v| v.abs()).sum())
        .collect();
    let thrust_channel: Vec<f64> = (0..n).map(|i| traj.controls[i][0]).collect();

    let peak_actuator = traj
        .rotor_thrusts
        .iter()
        .flat_map(|f| f.iter().cloned())
        .fold(0.0, f64::max);

    RunMetrics {
        diverged: traj.diverged,
        divergence_time: traj.divergence_time,
        j_in: inner_cost(traj, weights),
        j_out: outer_cost(traj, lambda),
        final_est_pos_err: if n > 0 { est_pos[last] } else { 0.0 },
        final_ctrl_pos_err: if n > 0 { ctrl_pos[last] } else { 0.0 },
        final_est_att_err_deg: if n > 0 {
            traj.estimation_error(last).fixed_rows::<3>(6).norm() * RAD_TO_DEG
        } else {
            0.0
        },
        final_ctrl_att_err_deg: if n > 0 {
            traj.control_error(last).fixed_rows::<3>(6).norm() * RAD_TO_DEG
        } else {
            0.0
        },
        control_effort: trapezoid(&abs_u, dt),
        control_effort_deviation: trapezoid(&abs_du, dt),
        energy_proxy: trapezoid(&thrust_channel, dt),
        settling_time: settling_time(&traj.time, &ctrl_pos),
        overshoot_pct: overshoot_pct(traj),
        peak_actuator,
        estimation_rmse: rms(&est_pos),
        position_rmse: rms(&track_pos),
        attitude_rmse_deg: rms(&track_att) * RAD_TO_DEG,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{InputVector, StateVector};
    use crate::riccati::identity_params;
    use nalgebra::Vector4;

    fn hover_trajectory(n: usize, dt: f64, thrust: f64) -> Trajectory {
        let u = InputVector::new(thrust, 0.0, 0.0, 0.0);
        Trajectory {
            time: (0..n).map(|k| k as f64 * dt).collect(),
            states: vec![StateVector::zeros(); n],
            estimates: vec![StateVector::zeros(); n],
            controls: vec![u; n],
            rotor_thrusts: vec![Vector4::repeat(thrust / 4.0); n],
            saturated: vec![false; n],
            reference: StateVector::zeros(),
            input_reference: u,
            horizon: (n - 1) as f64 * dt,
            diverged: false,
            divergence_time: None,
            online_position_integral: 0.0,
            online_attitude_integral: 0.0,
        }
    }

    #[test]
    fn perfect_hover_energy_proxy_is_weight_times_horizon() {
        let traj = hover_trajectory(5001, 0.002, 9.81);
        let weights = crate::riccati::weights_from_params(&identity_params()).unwrap();
        let m = compute_metrics(&traj, &weights, 0.1);
        assert!((m.energy_proxy - 98.1).abs() < 1e-9);
        assert!((m.control_effort - 98.1).abs() < 1e-9);
        assert_eq!(m.control_effort_deviation, 0.0);
        assert_eq!(m.settling_time, 0.0);
        assert_eq!(m.overshoot_pct, 0.0);
        assert!((m.peak_actuator - 9.81 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn diverged_run_scores_the_penalty() {
        let mut traj = hover_trajectory(11, 0.002, 9.81);
        traj.diverged = true;
        traj.divergence_time = Some(0.01);
        let weights = crate::riccati::weights_from_params(&identity_params()).unwrap();
        let m = compute_metrics(&traj, &weights, 0.1);
        assert!(m.diverged);
        assert!(m.j_out >= super::super::cost::DIVERGENCE_PENALTY);
        assert!(m.j_in >= super::super::cost::DIVERGENCE_PENALTY);
    }

    #[test]
    fn exponential_decay_settles_at_ln_fifty() {
        // ‖ε_ξ(t)‖ = e^{−t}; 2% of the peak is crossed at t = ln 50 ≈ 3.912.
        let dt = 0.001;
        let n = 8001;
        let mut traj = hover_trajectory(n, dt, 0.0);
        for k in 0..n {
            let t = k as f64 * dt;
            let mut dev = StateVector::zeros();
            dev[0] = (-t).exp();
            traj.estimates[k] = dev;
            traj.states[k] = dev;
        }
        let weights = crate::riccati::weights_from_params(&identity_params()).unwrap();
        let m = compute_metrics(&traj, &weights, 0.1);
        assert!((m.settling_time - 50f64.ln()).abs() <= 2.0 * dt, "got {}", m.settling_time);
        assert_eq!(m.overshoot_pct, 0.0);
    }

    #[test]
    fn rebound_past_the_hold_point_counts_as_overshoot() {
        let dt = 0.01;
        let n = 401;
        let mut traj = hover_trajectory(n, dt, 0.0);
        for k in 0..n {
            let t = k as f64 * dt;
            let mut dev = StateVector::zeros();
            // Damped oscillation along x: peak 1, first rebound ≈ e^{−π/2}.
            dev[0] = (-0.5 * t).exp() * (t).cos();
            traj.estimates[k] = dev;
            traj.states[k] = dev;
        }
        let weights = crate::riccati::weights_from_params(&identity_params()).unwrap();
        let m = compute_metrics(&traj, &weights, 0.1);
        // First minimum of e^{−0.5t}·cos t sits at t* = π − atan(1/2).
        let t_star = std::f64::consts::PI - 0.5f64.atan();
        let expected = -100.0 * (-0.5 * t_star).exp() * t_star.cos();
        assert!((m.overshoot_pct - expected).abs() < 0.1, "got {}", m.overshoot_pct);
    }
}
