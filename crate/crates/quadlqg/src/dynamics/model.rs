use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};

use super::types::{Control4, Equilibrium, InputVector, QuadrotorParams, State12, StateVector};

/// Margin kept from the ±π/2 pitch singularity of the Euler-rate map.
pub const ATTITUDE_GUARD: f64 = 1e-6;

/// Body-to-inertial rotation R_z(ψ) R_y(θ) R_x(φ).
pub fn rotation_matrix(attitude: &Vector3<f64>) -> Matrix3<f64> {
    let (sp, cp) = attitude.x.sin_cos();
    let (st, ct) = attitude.y.sin_cos();
    let (ss, cs) = attitude.z.sin_cos();
    Matrix3::new(
        cs * ct,
        cs * st * sp - ss * cp,
        cs * st * cp + ss * sp,
        ss * ct,
        ss * st * sp + cs * cp,
        ss * st * cp - cs * sp,
        -st,
        ct * sp,
        ct * cp,
    )
}

/// Map from body rates to Euler-angle rates. Singular at |pitch| = π/2.
pub fn euler_rate_matrix(attitude: &Vector3<f64>) -> Result<Matrix3<f64>> {
    use std::f64::consts::FRAC_PI_2;
    let (phi, theta) = (attitude.x, attitude.y);
    if theta.abs() >= FRAC_PI_2 - ATTITUDE_GUARD {
        return Err(Error::SingularAttitude { theta });
    }
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let tt = st / ct;
    Ok(Matrix3::new(
        1.0,
        sp * tt,
        cp * tt,
        0.0,
        cp,
        -sp,
        0.0,
        sp / ct,
        cp / ct,
    ))
}

/// Time derivative of the augmented state under the Newton–Euler model,
/// operating on raw 12-vectors. Layout matches `State12::to_vector`.
pub fn dynamics_derivative_vec(
    x: &StateVector,
    u: &InputVector,
    p: &QuadrotorParams,
) -> Result<StateVector> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("state"));
    }
    if !u.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("control input"));
    }
    let velocity = Vector3::new(x[3], x[4], x[5]);
    let attitude = Vector3::new(x[6], x[7], x[8]);
    let rates = Vector3::new(x[9], x[10], x[11]);

    let rot = rotation_matrix(&attitude);
    let w_eta = euler_rate_matrix(&attitude)?;

    // Gravity direction expressed in the body frame: Rᵀ e_z.
    let gravity_body = rot.transpose() * Vector3::new(0.0, 0.0, p.gravity);

    let thrust = Vector3::new(0.0, 0.0, u[0] / p.mass);
    let torque = Vector3::new(u[1], u[2], u[3]);

    let pos_dot = rot * velocity;
    let vel_dot = thrust - rates.cross(&velocity) - gravity_body;
    let att_dot = w_eta * rates;
    let inertia_lu = p.inertia.lu();
    let rate_dot = inertia_lu
        .solve(&(torque - rates.cross(&(p.inertia * rates))))
        .ok_or(Error::InvalidParameter("inertia tensor is singular".into()))?;

    let mut dx = StateVector::zeros();
    dx.fixed_rows_mut::<3>(0).copy_from(&pos_dot);
    dx.fixed_rows_mut::<3>(3).copy_from(&vel_dot);
    dx.fixed_rows_mut::<3>(6).copy_from(&att_dot);
    dx.fixed_rows_mut::<3>(9).copy_from(&rate_dot);
    Ok(dx)
}

/// Typed wrapper over [`dynamics_derivative_vec`].
pub fn dynamics_derivative(x: &State12, u: &Control4, p: &QuadrotorParams) -> Result<StateVector> {
    dynamics_derivative_vec(&x.to_vector(), &u.to_vector(), p)
}

/// The 4×4 map from squared rotor speeds to (thrust, roll, pitch, yaw torque).
///
/// Rotor layout: 1 front, 2 right, 3 rear, 4 left; odd rotors spin opposite
/// to even ones, so drag torques enter with sign (−1)^i.
pub fn mixing_matrix(p: &QuadrotorParams) -> Matrix4<f64> {
    let kt = p.thrust_coeff;
    let km = p.torque_coeff;
    let lkt = p.arm_length * kt;
    Matrix4::new(
        kt, kt, kt, kt, //
        0.0, -lkt, 0.0, lkt, //
        -lkt, 0.0, lkt, 0.0, //
        -km, km, -km, km,
    )
}

/// Thrust and torques produced by the four rotors at speeds Ω [rad/s].
pub fn motor_mixing(speeds: &Vector4<f64>, p: &QuadrotorParams) -> Result<Control4> {
    for (i, &w) in speeds.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite("rotor speeds"));
        }
        if w < p.rotor_speed_min || w > p.rotor_speed_max {
            return Err(Error::RotorSpeedOutOfRange { index: i + 1, speed: w });
        }
    }
    let squared = speeds.map(|w| w * w);
    let u = mixing_matrix(p) * squared;
    Control4::from_vector(&u)
}

/// Squared rotor speeds realizing a commanded input, solving the mixing map.
/// Negative solutions are clamped to zero; the flag reports whether any
/// clamping happened (the command was infeasible as stated).
pub fn inverse_mixing(u: &Control4, p: &QuadrotorParams) -> (Vector4<f64>, bool) {
    let solved = mixing_matrix(p)
        .lu()
        .solve(&u.to_vector())
        .expect("mixing matrix is invertible for valid parameters");
    let clamped = solved.iter().any(|&s| s < 0.0);
    (solved.map(|s| s.max(0.0)), clamped)
}

/// Hover fixed point at a given position and heading: zero velocities and
/// rates, level attitude, thrust balancing gravity.
pub fn hover_equilibrium(
    p: &QuadrotorParams,
    position: Vector3<f64>,
    yaw: f64,
) -> Result<Equilibrium> {
    p.validate()?;
    let state = State12::new(
        position,
        Vector3::zeros(),
        Vector3::new(0.0, 0.0, yaw),
        Vector3::zeros(),
    )?;
    let input = Control4::new(p.hover_thrust(), Vector3::zeros())?;
    Ok(Equilibrium { state, input })
}
