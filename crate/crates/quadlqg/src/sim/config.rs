use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};

/// Which plant the closed loop runs against. The estimator and controller
/// always use the linear hover model; the plant choice decides how much
/// model mismatch they face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantModel {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisturbanceKind {
    None,
    /// Rectangular force/torque pulse of the given amplitude over the window.
    Impulse,
    /// 1-cosine gust: amplitude · ½(1 − cos 2π(t−onset)/duration).
    OneCosineGust,
}

/// External force (inertial frame) and torque (body frame) forcing profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSpec {
    pub kind: DisturbanceKind,
    /// Start of the disturbance window [s].
    pub onset: f64,
    /// Length of the disturbance window [s].
    pub duration: f64,
    /// Peak force amplitude [N], inertial frame.
    pub force: Vector3<f64>,
    /// Peak torque amplitude [N·m], body frame.
    pub torque: Vector3<f64>,
}

impl DisturbanceSpec {
    pub fn none() -> Self {
        Self {
            kind: DisturbanceKind::None,
            onset: 0.0,
            duration: 1.0,
            force: Vector3::zeros(),
            torque: Vector3::zeros(),
        }
    }

    /// The standardized unit gust: 1 N per horizontal axis and 0.1 N·m of
    /// roll torque, shaped as a 1-second 1-cosine pulse starting at t = 1 s.
    pub fn unit_gust() -> Self {
        Self {
            kind: DisturbanceKind::OneCosineGust,
            onset: 1.0,
            duration: 1.0,
            force: Vector3::new(1.0, 1.0, 0.0),
            torque: Vector3::new(0.1, 0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.onset.is_finite() && self.duration.is_finite()) {
            return Err(Error::NonFinite("disturbance spec"));
        }
        if !self.force.iter().chain(self.torque.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("disturbance amplitude"));
        }
        if self.onset < 0.0 {
            return Err(Error::InvalidParameter("disturbance onset must be >= 0".into()));
        }
        if self.kind != DisturbanceKind::None && self.duration <= 0.0 {
            return Err(Error::InvalidParameter("disturbance duration must be > 0".into()));
        }
        Ok(())
    }

    /// Force/torque at time t.
    pub fn at(&self, t: f64) -> (Vector3<f64>, Vector3<f64>) {
        let window = t >= self.onset && t <= self.onset + self.duration;
        let shape = match self.kind {
            DisturbanceKind::None => 0.0,
            DisturbanceKind::Impulse => {
                if window {
                    1.0
                } else {
                    0.0
                }
            }
            DisturbanceKind::OneCosineGust => {
                if window {
                    let phase = 2.0 * std::f64::consts::PI * (t - self.onset) / self.duration;
                    0.5 * (1.0 - phase.cos())
                } else {
                    0.0
                }
            }
        };
        (self.force * shape, self.torque * shape)
    }
}

/// Rollout configuration. `seed` drives every random draw of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Horizon [s].
    pub horizon: f64,
    /// Fixed integration step [s].
    pub dt: f64,
    pub plant: PlantModel,
    pub seed: u64,
    pub disturbance: DisturbanceSpec,
    /// Clamp commands through the rotor-speed limits.
    pub saturation: bool,
    /// Initial true-state deviation from the equilibrium.
    pub initial_offset: StateVector,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            dt: 0.002,
            plant: PlantModel::Nonlinear,
            seed: 0,
            disturbance: DisturbanceSpec::unit_gust(),
            saturation: true,
            initial_offset: StateVector::zeros(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.dt.is_finite()) {
            return Err(Error::NonFinite("simulation config"));
        }
        if self.horizon <= 0.0 {
            return Err(Error::InvalidParameter("horizon must be > 0".into()));
        }
        if self.dt <= 0.0 || self.dt > 0.01 {
            return Err(Error::InvalidParameter(format!(
                "dt must lie in (0, 0.01], got {}",
                self.dt
            )));
        }
        let ratio = self.horizon / self.dt;
        if (ratio - ratio.round()).abs() > 1e-6 * ratio.round().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon/dt = {ratio} is not an integer step count"
            )));
        }
        if !self.initial_offset.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("initial offset"));
        }
        self.disturbance.validate()
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}
