use nalgebra::{Matrix3, SMatrix, SVector, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of states: position, body velocity, Euler angles, body rates.
pub const STATE_DIM: usize = 12;
/// Number of idealized control inputs: collective thrust plus three torques.
pub const INPUT_DIM: usize = 4;
/// Number of measured outputs: position and attitude.
pub const MEAS_DIM: usize = 6;

pub type StateVector = SVector<f64, STATE_DIM>;
pub type InputVector = Vector4<f64>;
pub type StateMatrix = SMatrix<f64, STATE_DIM, STATE_DIM>;
pub type InputMatrix = SMatrix<f64, STATE_DIM, INPUT_DIM>;
pub type OutputMatrix = SMatrix<f64, MEAS_DIM, STATE_DIM>;

/// Physical constants of the airframe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrotorParams {
    /// Body mass [kg].
    pub mass: f64,
    /// Inertia tensor in the body frame [kg·m²].
    pub inertia: Matrix3<f64>,
    /// Distance from the center of mass to each rotor [m].
    pub arm_length: f64,
    /// Lumped thrust coefficient [N·s²]: f_i = k_T Ω_i².
    pub thrust_coeff: f64,
    /// Lumped drag-torque coefficient [N·m·s²]: τ_i = ±k_M Ω_i².
    pub torque_coeff: f64,
    /// Gravitational acceleration [m/s²].
    pub gravity: f64,
    /// Lower rotor speed limit [rad/s].
    pub rotor_speed_min: f64,
    /// Upper rotor speed limit [rad/s].
    pub rotor_speed_max: f64,
}

impl Default for QuadrotorParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            inertia: Matrix3::from_diagonal(&Vector3::new(0.01, 0.01, 0.02)),
            arm_length: 0.2,
            thrust_coeff: 1e-5,
            torque_coeff: 2e-7,
            gravity: 9.81,
            rotor_speed_min: 0.0,
            rotor_speed_max: 1200.0,
        }
    }
}

impl QuadrotorParams {
    pub fn validate(&self) -> Result<()> {
        let scalars = [
            ("mass", self.mass),
            ("arm_length", self.arm_length),
            ("thrust_coeff", self.thrust_coeff),
            ("torque_coeff", self.torque_coeff),
            ("gravity", self.gravity),
        ];
        for (name, value) in scalars {
            if !value.is_finite() {
                return Err(Error::NonFinite("quadrotor parameters"));
            }
            if value <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {value}")));
            }
        }
        if !(self.rotor_speed_min.is_finite() && self.rotor_speed_max.is_finite()) {
            return Err(Error::NonFinite("rotor speed limits"));
        }
        if self.rotor_speed_min < 0.0 || self.rotor_speed_min >= self.rotor_speed_max {
            return Err(Error::InvalidParameter(format!(
                "rotor speed limits must satisfy 0 <= min < max, got [{}, {}]",
                self.rotor_speed_min, self.rotor_speed_max
            )));
        }
        if (self.inertia - self.inertia.transpose()).amax() > 1e-12 * (1.0 + self.inertia.amax()) {
            return Err(Error::InvalidParameter("inertia tensor must be symmetric".into()));
        }
        let eigs = self.inertia.symmetric_eigenvalues();
        if eigs.min() <= 0.0 {
            return Err(Error::InvalidParameter(
                "inertia tensor must be positive definite".into(),
            ));
        }
        Ok(())
    }

    /// Thrust that balances gravity.
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }
}

/// Augmented rigid-body state: inertial position, body-frame velocity,
/// Euler angles (roll, pitch, yaw), body-frame angular rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State12 {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: Vector3<f64>,
    pub rates: Vector3<f64>,
}

/// Wrap an angle into (−π, π]. Values already in range pass through exactly.
fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    if -PI < a && a <= PI {
        return a;
    }
    let mut w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

impl State12 {
    /// Builds a state, wrapping all angles into (−π, π]. Roll and pitch must
    /// land inside (−π/2, π/2); anything else is a singular attitude.
    pub fn new(
        position: Vector3<f64>,
        velocity: Vector3<f64>,
        attitude: Vector3<f64>,
        rates: Vector3<f64>,
    ) -> Result<Self> {
        for v in [&position, &velocity, &attitude, &rates] {
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite("state"));
            }
        }
        let attitude = attitude.map(wrap_angle);
        use std::f64::consts::FRAC_PI_2;
        for ang in [attitude.x, attitude.y] {
            if ang.abs() >= FRAC_PI_2 {
                return Err(Error::SingularAttitude { theta: ang });
            }
        }
        Ok(Self { position, velocity, attitude, rates })
    }

    pub fn from_vector(x: &StateVector) -> Result<Self> {
        Self::new(
            Vector3::new(x[0], x[1], x[2]),
            Vector3::new(x[3], x[4], x[5]),
            Vector3::new(x[6], x[7], x[8]),
            Vector3::new(x[9], x[10], x[11]),
        )
    }

    pub fn to_vector(&self) -> StateVector {
        let mut x = StateVector::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&self.position);
        x.fixed_rows_mut::<3>(3).copy_from(&self.velocity);
        x.fixed_rows_mut::<3>(6).copy_from(&self.attitude);
        x.fixed_rows_mut::<3>(9).copy_from(&self.rates);
        x
    }
}

/// Idealized control input: collective thrust [N] and body torques [N·m].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Control4 {
    pub thrust: f64,
    pub torque: Vector3<f64>,
}

impl Control4 {
    pub fn new(thrust: f64, torque: Vector3<f64>) -> Result<Self> {
        if !thrust.is_finite() || !torque.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("control input"));
        }
        Ok(Self { thrust, torque })
    }

    pub fn from_vector(u: &InputVector) -> Result<Self> {
        Self::new(u[0], Vector3::new(u[1], u[2], u[3]))
    }

    pub fn to_vector(&self) -> InputVector {
        Vector4::new(self.thrust, self.torque.x, self.torque.y, self.torque.z)
    }
}

/// A fixed point of the dynamics together with the input that holds it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub state: State12,
    pub input: Control4,
}

/// Linear time-invariant model about an equilibrium: ẋ = AΔx + BΔu, y = CΔx.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub a: StateMatrix,
    pub b: InputMatrix,
    pub c: OutputMatrix,
    pub equilibrium: Equilibrium,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn default_params_pass_validation() {
        QuadrotorParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_mass() {
        let p = QuadrotorParams { mass: 0.0, ..Default::default() };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn rejects_inverted_rotor_limits() {
        let p = QuadrotorParams { rotor_speed_min: 1300.0, ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn yaw_wraps_into_half_open_interval() {
        let s = State12::new(
            Vector3::zeros(),
            Vector3::zeros(),
            Vector3::new(0.0, 0.0, 3.0 * PI),
            Vector3::zeros(),
        )
        .unwrap();
        assert!((s.attitude.z - PI).abs() < 1e-12);

        let s = State12::new(
            Vector3::zeros(),
            Vector3::zeros(),
            Vector3::new(2.0 * PI - 0.1, 0.0, -5.0 * PI),
            Vector3::zeros(),
        )
        .unwrap();
        assert!((s.attitude.x + 0.1).abs() < 1e-12);
        assert!((s.attitude.z - PI).abs() < 1e-12);
    }

    #[test]
    fn near_vertical_pitch_is_rejected() {
        let r = State12::new(
            Vector3::zeros(),
            Vector3::zeros(),
            Vector3::new(0.0, PI / 2.0, 0.0),
            Vector3::zeros(),
        );
        assert!(matches!(r, Err(Error::SingularAttitude { .. })));
    }

    #[test]
    fn state_vector_roundtrip() {
        let s = State12::new(
            Vector3::new(1.0, 2.0, 3.0),
            Vector3::new(0.1, -0.2, 0.3),
            Vector3::new(0.2, -0.3, 1.0),
            Vector3::new(0.5, 0.6, -0.7),
        )
        .unwrap();
        let back = State12::from_vector(&s.to_vector()).unwrap();
        assert_eq!(s, back);
    }
}
