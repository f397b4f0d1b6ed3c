use nalgebra::{Matrix3, SMatrix, Vector3, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::{
    dynamics_derivative_vec, inverse_mixing, mixing_matrix, rotation_matrix, Control4,
    InputVector, LinearModel, QuadrotorParams, StateVector, MEAS_DIM,
};
use crate::error::Result;
use crate::riccati::{LqgGains, LqgWeights};

use super::config::{PlantModel, SimConfig};
use super::trajectory::Trajectory;

/// State-norm threshold beyond which a run is declared diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Square root factor of a PSD matrix via its symmetric eigendecomposition,
/// tolerant of zero and rank-deficient inputs.
fn psd_sqrt<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let sym = nalgebra::DMatrix::from_fn(N, N, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = sym.symmetric_eigen();
    let mut scaled = eig.eigenvectors;
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        scaled.column_mut(j).scale_mut(s);
    }
    SMatrix::from_column_slice(scaled.as_slice())
}

struct Loop<'a> {
    model: &'a LinearModel,
    params: &'a QuadrotorParams,
    gains: &'a LqgGains,
    cfg: &'a SimConfig,
    x_eq: StateVector,
    u_eq: InputVector,
    inertia_inv: Matrix3<f64>,
}

impl Loop<'_> {
    /// Plant derivative with the held input and the disturbance at time t.
    fn plant_derivative(&self, x: &StateVector, u: &InputVector, t: f64) -> Result<StateVector> {
        let (force, torque) = self.cfg.disturbance.at(t);
        let mut dx = match self.cfg.plant {
            PlantModel::Linear => {
                let mut dx = self.model.a * (x - self.x_eq) + self.model.b * (u - self.u_eq);
                // Near hover the body and inertial frames coincide.
                let accel = force / self.params.mass;
                for i in 0..3 {
                    dx[3 + i] += accel[i];
                }
                dx
            }
            PlantModel::Nonlinear => {
                let mut dx = dynamics_derivative_vec(x, u, self.params)?;
                let rot = rotation_matrix(&Vector3::new(x[6], x[7], x[8]));
                let accel = rot.transpose() * force / self.params.mass;
                for i in 0..3 {
                    dx[3 + i] += accel[i];
                }
                dx
            }
        };
        let ang = self.inertia_inv * torque;
        for i in 0..3 {
            dx[9 + i] += ang[i];
        }
        Ok(dx)
    }

    /// Estimator derivative: linear model plus innovation, with y and u held.
    fn filter_derivative(
        &self,
        xhat: &StateVector,
        u: &InputVector,
        y: &SMatrix<f64, MEAS_DIM, 1>,
    ) -> StateVector {
        let dev = xhat - self.x_eq;
        self.model.a * dev
            + self.model.b * (u - self.u_eq)
            + self.gains.l * (y - self.model.c * dev)
    }

    fn rk4_plant(&self, x: &StateVector, u: &InputVector, t: f64, dt: f64) -> Result<StateVector> {
        let k1 = self.plant_derivative(x, u, t)?;
        let k2 = self.plant_derivative(&(x + k1 * (dt / 2.0)), u, t + dt / 2.0)?;
        let k3 = self.plant_derivative(&(x + k2 * (dt / 2.0)), u, t + dt / 2.0)?;
        let k4 = self.plant_derivative(&(x + k3 * dt), u, t + dt)?;
        Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
    }

    fn rk4_filter(
        &self,
        xhat: &StateVector,
        u: &InputVector,
        y: &SMatrix<f64, MEAS_DIM, 1>,
        dt: f64,
    ) -> StateVector {
        let k1 = self.filter_derivative(xhat, u, y);
        let k2 = self.filter_derivative(&(xhat + k1 * (dt / 2.0)), u, y);
        let k3 = self.filter_derivative(&(xhat + k2 * (dt / 2.0)), u, y);
        let k4 = self.filter_derivative(&(xhat + k3 * dt), u, y);
        xhat + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
    }
}

/// Clamp a command through the squared-rotor-speed limits.
fn saturate(
    u_cmd: &InputVector,
    params: &QuadrotorParams,
) -> (InputVector, Vector4<f64>, bool) {
    let control = Control4 {
        thrust: u_cmd[0],
        torque: Vector3::new(u_cmd[1], u_cmd[2], u_cmd[3]),
    };
    let (squared, mut clamped) = inverse_mixing(&control, params);
    let lo = params.rotor_speed_min * params.rotor_speed_min;
    let hi = params.rotor_speed_max * params.rotor_speed_max;
    let limited = squared.map(|s| {
        if s < lo || s > hi {
            clamped = true;
        }
        s.clamp(lo, hi)
    });
    let u_app = mixing_matrix(params) * limited;
    (u_app, limited * params.thrust_coeff, clamped)
}

/// Per-rotor thrusts equivalent to an unclamped command, for bookkeeping.
fn rotor_thrusts_unclamped(u_cmd: &InputVector, params: &QuadrotorParams) -> Vector4<f64> {
    let control = Control4 {
        thrust: u_cmd[0],
        torque: Vector3::new(u_cmd[1], u_cmd[2], u_cmd[3]),
    };
    let (squared, _) = inverse_mixing(&control, params);
    squared * params.thrust_coeff
}

/// Runs the closed loop: plant (linear or nonlinear) under u = u_e − K(x̂ −
/// x_ref), Kalman estimator with static innovation gain against noisy
/// measurements, seeded Euler–Maruyama noise injection, optional actuator
/// saturation, and divergence detection. Divergence is a result, not an
/// error: the trajectory is truncated and flagged.
pub fn simulate(
    model: &LinearModel,
    params: &QuadrotorParams,
    gains: &LqgGains,
    noise: &LqgWeights,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    params.validate()?;

    let x_eq = model.equilibrium.state.to_vector();
    let u_eq = model.equilibrium.input.to_vector();
    let inertia_inv = params
        .inertia
        .try_inverse()
        .ok_or(crate::Error::InvalidParameter("inertia tensor is singular".into()))?;

    let ctx = Loop { model, params, gains, cfg, x_eq, u_eq, inertia_inv };

    let steps = cfg.steps();
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();

    let process_factor = psd_sqrt(&noise.w);
    let meas_factor = psd_sqrt(&noise.v);
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let normal = StandardNormal;
    let draw_state = |rng: &mut ChaCha12Rng| {
        StateVector::from_fn(|_, _| normal.sample(rng))
    };
    let draw_meas = |rng: &mut ChaCha12Rng| {
        SMatrix::<f64, MEAS_DIM, 1>::from_fn(|_, _| normal.sample(rng))
    };

    let mut traj = Trajectory {
        time: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        estimates: Vec::with_capacity(steps + 1),
        controls: Vec::with_capacity(steps + 1),
        rotor_thrusts: Vec::with_capacity(steps + 1),
        saturated: Vec::with_capacity(steps + 1),
        reference: x_eq,
        input_reference: u_eq,
        horizon: cfg.horizon,
        diverged: false,
        divergence_time: None,
        online_position_integral: 0.0,
        online_attitude_integral: 0.0,
    };

    let mut x = x_eq + cfg.initial_offset;
    let mut xhat = x_eq;
    let mut prev_pos_err = f64::NAN;
    let mut prev_att_err = f64::NAN;

    for k in 0..=steps {
        let t = k as f64 * dt;

        // Measurement, then control from the current estimate.
        let v = (meas_factor * draw_meas(&mut rng)) / sqrt_dt;
        let y = model.c * (x - x_eq) + v;
        let u_cmd = u_eq - gains.k * (xhat - x_eq);
        let (u_app, thrusts, sat) = if cfg.saturation {
            saturate(&u_cmd, params)
        } else {
            (u_cmd, rotor_thrusts_unclamped(&u_cmd, params), false)
        };

        traj.time.push(t);
        traj.states.push(x);
        traj.estimates.push(xhat);
        traj.controls.push(u_app);
        traj.rotor_thrusts.push(thrusts);
        traj.saturated.push(sat);

        // Online outer-cost bookkeeping (trapezoid in index order).
        let err = xhat - x_eq;
        let pos_err = err.fixed_rows::<3>(0).norm();
        let att_err = err.fixed_rows::<3>(6).norm();
        if k > 0 {
            traj.online_position_integral += 0.5 * (prev_pos_err + pos_err) * dt;
            traj.online_attitude_integral += 0.5 * (prev_att_err + att_err) * dt;
        }
        prev_pos_err = pos_err;
        prev_att_err = att_err;

        if k == steps {
            break;
        }

        // Advance plant and estimator; inject process noise once per step.
        let x_next = match ctx.rk4_plant(&x, &u_app, t, dt) {
            Ok(v) => v + process_factor * draw_state(&mut rng) * sqrt_dt,
            Err(_) => {
                // Attitude left the valid cone mid-step: the vehicle tumbled.
                traj.diverged = true;
                traj.divergence_time = Some(t);
                break;
            }
        };
        let xhat_next = ctx.rk4_filter(&xhat, &u_app, &y, dt);

        let finite = x_next.iter().chain(xhat_next.iter()).all(|z| z.is_finite());
        if !finite {
            traj.diverged = true;
            traj.divergence_time = Some(t + dt);
            break;
        }
        x = x_next;
        xhat = xhat_next;
        if (x - x_eq).norm() > DIVERGENCE_THRESHOLD || (xhat - x_eq).norm() > DIVERGENCE_THRESHOLD
        {
            traj.diverged = true;
            traj.divergence_time = Some(t + dt);
            break;
        }
    }

    Ok(traj)
}
