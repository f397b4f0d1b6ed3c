use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{INPUT_DIM, STATE_DIM};
use crate::error::{Error, Result};
use crate::riccati::LqgWeights;

/// Maximum-acceptable-deviation table feeding Bryson's rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrysonDeviations {
    /// Position [m].
    pub position: [f64; 3],
    /// Body velocity [m/s].
    pub velocity: [f64; 3],
    /// Attitude [rad].
    pub attitude: [f64; 3],
    /// Body rates [rad/s].
    pub rates: [f64; 3],
    /// Controls: thrust [N] and torques [N·m].
    pub controls: [f64; 4],
}

impl Default for BrysonDeviations {
    fn default() -> Self {
        Self {
            position: [0.5, 0.5, 0.5],
            velocity: [1.0, 1.0, 1.0],
            attitude: [0.3, 0.3, 0.5],
            rates: [2.0, 2.0, 2.0],
            controls: [5.0, 0.5, 0.5, 0.1],
        }
    }
}

impl BrysonDeviations {
    pub fn state_vector(&self) -> SVector<f64, STATE_DIM> {
        let mut v = SVector::<f64, STATE_DIM>::zeros();
        for i in 0..3 {
            v[i] = self.position[i];
            v[3 + i] = self.velocity[i];
            v[6 + i] = self.attitude[i];
            v[9 + i] = self.rates[i];
        }
        v
    }

    pub fn input_vector(&self) -> SVector<f64, INPUT_DIM> {
        SVector::<f64, INPUT_DIM>::from_column_slice(&self.controls)
    }
}

/// Diagonal weights from inverse squared maximum deviations:
/// Q_ii = 1/dev_x_i², R_jj = 1/dev_u_j².
pub fn brysons_rule(
    max_dev_state: &SVector<f64, STATE_DIM>,
    max_dev_input: &SVector<f64, INPUT_DIM>,
) -> Result<LqgWeights> {
    for d in max_dev_state.iter().chain(max_dev_input.iter()) {
        if !d.is_finite() {
            return Err(Error::NonFinite("Bryson deviations"));
        }
        if *d <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Bryson deviations must be > 0, got {d}"
            )));
        }
    }
    let q_diag = max_dev_state.map(|d| 1.0 / (d * d));
    let r_diag = max_dev_input.map(|d| 1.0 / (d * d));
    LqgWeights::from_qr_diag(&q_diag, &r_diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::{QMatrix, RMatrix};

    #[test]
    fn unit_deviations_give_identity_weights() {
        let w = brysons_rule(&SVector::repeat(1.0), &SVector::repeat(1.0)).unwrap();
        assert!((w.q - QMatrix::identity()).amax() < 1e-12);
        assert!((w.r - RMatrix::identity()).amax() < 1e-12);
    }

    #[test]
    fn half_meter_position_deviation_weighs_four() {
        let devs = BrysonDeviations::default();
        let w = brysons_rule(&devs.state_vector(), &devs.input_vector()).unwrap();
        assert!((w.q[(0, 0)] - 4.0).abs() < 1e-12);
        assert!((w.q[(2, 2)] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn output_satisfies_the_parameterization_invariants() {
        let devs = BrysonDeviations::default();
        let w = brysons_rule(&devs.state_vector(), &devs.input_vector()).unwrap();
        assert!(w.q.symmetric_eigenvalues().min() > 0.0);
        assert!(w.r.symmetric_eigenvalues().min() > 0.0);
        // Its parameter vector regenerates the same weights.
        let back = LqgWeights::from_params(&w.to_params()).unwrap();
        assert!((back.q - w.q).amax() < 1e-12);
        assert!((back.r - w.r).amax() < 1e-12);
    }

    #[test]
    fn rejects_zero_deviation() {
        let mut dev = SVector::<f64, STATE_DIM>::repeat(1.0);
        dev[4] = 0.0;
        assert!(brysons_rule(&dev, &SVector::repeat(1.0)).is_err());
    }
}
