use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{INPUT_DIM, MEAS_DIM, STATE_DIM};
use crate::error::{Error, Result};

/// Lower-triangle entry count of the 12×12 state-weight factor.
pub const Q_TRI_DIM: usize = STATE_DIM * (STATE_DIM + 1) / 2;
/// Lower-triangle entry count of the 4×4 input-weight factor.
pub const R_TRI_DIM: usize = INPUT_DIM * (INPUT_DIM + 1) / 2;
/// Full parameter vector length of the Cholesky weight parameterization.
pub const PARAM_DIM: usize = Q_TRI_DIM + R_TRI_DIM;

/// Floor added to Cholesky diagonals so R stays invertible for any input.
pub const DIAG_FLOOR: f64 = 1e-8;

pub type QMatrix = SMatrix<f64, STATE_DIM, STATE_DIM>;
pub type RMatrix = SMatrix<f64, INPUT_DIM, INPUT_DIM>;
pub type VMatrix = SMatrix<f64, MEAS_DIM, MEAS_DIM>;

/// LQG weighting set: Cholesky factors of the cost weights Q and R plus the
/// process/measurement noise covariances W and V.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqgWeights {
    /// Lower-triangular factor with Q = L_Q L_Qᵀ.
    pub l_q: QMatrix,
    /// Lower-triangular factor with R = L_R L_Rᵀ.
    pub l_r: RMatrix,
    pub q: QMatrix,
    pub r: RMatrix,
    /// Process noise covariance.
    pub w: QMatrix,
    /// Measurement noise covariance.
    pub v: VMatrix,
}

/// Process noise used when a caller does not supply one.
pub fn default_process_noise() -> QMatrix {
    QMatrix::identity() * 1e-5
}

/// Measurement noise used when a caller does not supply one: centimeter-grade
/// position sensing and milliradian-grade attitude sensing.
pub fn default_measurement_noise() -> VMatrix {
    let mut v = VMatrix::zeros();
    for i in 0..3 {
        v[(i, i)] = 1e-4;
        v[(i + 3, i + 3)] = 1e-6;
    }
    v
}

fn positive_diag(d: f64) -> f64 {
    d.abs() + DIAG_FLOOR
}

fn fill_lower_triangle<const N: usize>(theta: &[f64]) -> SMatrix<f64, N, N> {
    let mut l = SMatrix::<f64, N, N>::zeros();
    let mut idx = 0;
    for row in 0..N {
        for col in 0..=row {
            l[(row, col)] = if col == row { positive_diag(theta[idx]) } else { theta[idx] };
            idx += 1;
        }
    }
    l
}

fn extract_lower_triangle<const N: usize>(l: &SMatrix<f64, N, N>, out: &mut Vec<f64>) {
    for row in 0..N {
        for col in 0..=row {
            out.push(if col == row { l[(row, col)] - DIAG_FLOOR } else { l[(row, col)] });
        }
    }
}

impl LqgWeights {
    /// Builds weights from the flat 88-parameter vector: the lower triangles
    /// of L_Q and L_R in row-major order, diagonals passed through |d| + δ.
    /// Noise covariances take their defaults; see [`LqgWeights::with_noise`].
    pub fn from_params(theta: &[f64]) -> Result<Self> {
        if theta.len() != PARAM_DIM {
            return Err(Error::DimensionMismatch { expected: PARAM_DIM, got: theta.len() });
        }
        if !theta.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("weight parameters"));
        }
        let l_q = fill_lower_triangle::<STATE_DIM>(&theta[..Q_TRI_DIM]);
        let l_r = fill_lower_triangle::<INPUT_DIM>(&theta[Q_TRI_DIM..]);
        Ok(Self {
            q: &l_q * l_q.transpose(),
            r: &l_r * l_r.transpose(),
            l_q,
            l_r,
            w: default_process_noise(),
            v: default_measurement_noise(),
        })
    }

    /// Diagonal weights Q = diag(q), R = diag(r); entries must be non-negative.
    pub fn from_qr_diag(q_diag: &SVector<f64, STATE_DIM>, r_diag: &SVector<f64, INPUT_DIM>) -> Result<Self> {
        if q_diag.iter().chain(r_diag.iter()).any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter("diagonal weights must be >= 0".into()));
        }
        let l_q = QMatrix::from_diagonal(&q_diag.map(|x| x.sqrt().max(DIAG_FLOOR)));
        let l_r = RMatrix::from_diagonal(&r_diag.map(|x| x.sqrt().max(DIAG_FLOOR)));
        Ok(Self {
            q: &l_q * l_q.transpose(),
            r: &l_r * l_r.transpose(),
            l_q,
            l_r,
            w: default_process_noise(),
            v: default_measurement_noise(),
        })
    }

    pub fn with_noise(mut self, w: QMatrix, v: VMatrix) -> Self {
        self.w = w;
        self.v = v;
        self
    }

    /// Inverse of [`LqgWeights::from_params`] on its canonical range: the
    /// stored factors back as a flat vector, diagonals shifted down by δ.
    pub fn to_params(&self) -> Vec<f64> {
        let mut theta = Vec::with_capacity(PARAM_DIM);
        extract_lower_triangle(&self.l_q, &mut theta);
        extract_lower_triangle(&self.l_r, &mut theta);
        theta
    }
}

/// Free-function spelling of [`LqgWeights::from_params`].
pub fn weights_from_params(theta: &[f64]) -> Result<LqgWeights> {
    LqgWeights::from_params(theta)
}

/// Free-function spelling of [`LqgWeights::to_params`].
pub fn params_from_weights(weights: &LqgWeights) -> Vec<f64> {
    weights.to_params()
}

/// Parameter vector whose weights are exactly Q = I, R = I.
pub fn identity_params() -> Vec<f64> {
    let w = LqgWeights::from_qr_diag(
        &SVector::<f64, STATE_DIM>::repeat(1.0),
        &SVector::<f64, INPUT_DIM>::repeat(1.0),
    )
    .expect("unit diagonals are valid");
    w.to_params()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_params_reproduce_identity_weights() {
        let theta = identity_params();
        assert_eq!(theta.len(), PARAM_DIM);
        let w = weights_from_params(&theta).unwrap();
        assert!((w.q - QMatrix::identity()).amax() < 1e-12);
        assert!((w.r - RMatrix::identity()).amax() < 1e-12);
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(matches!(
            weights_from_params(&[0.0; 87]),
            Err(Error::DimensionMismatch { expected: 88, got: 87 })
        ));
    }

    #[test]
    fn gram_construction_is_psd_for_arbitrary_theta() {
        let mut state = 0x452821e638d01377u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0
        };
        for _ in 0..25 {
            let theta: Vec<f64> = (0..PARAM_DIM).map(|_| next()).collect();
            let w = weights_from_params(&theta).unwrap();
            assert!((w.q - w.q.transpose()).amax() < 1e-12);
            assert!(w.q.symmetric_eigenvalues().min() >= -1e-10);
            // R is strictly PD thanks to the diagonal floor.
            assert!(w.r.symmetric_eigenvalues().min() >= DIAG_FLOOR * DIAG_FLOOR * 0.9);
        }
    }

    #[test]
    fn param_roundtrip_on_nonnegative_diagonals() {
        // The positive map folds the diagonal's sign, so the roundtrip is
        // exercised on its canonical (non-negative diagonal) domain.
        let mut state = 0xbe5466cf34e90c6cu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        let mut idx = 0;
        let mut theta = Vec::with_capacity(PARAM_DIM);
        for n in [STATE_DIM, INPUT_DIM] {
            for row in 0..n {
                for col in 0..=row {
                    let v = next();
                    theta.push(if col == row { v.abs() } else { v });
                    idx += 1;
                }
            }
        }
        assert_eq!(idx, PARAM_DIM);
        let back = params_from_weights(&weights_from_params(&theta).unwrap());
        for (a, b) in theta.iter().zip(back.iter()) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn default_noise_shapes() {
        let w = default_process_noise();
        let v = default_measurement_noise();
        assert!(w.symmetric_eigenvalues().min() > 0.0);
        assert!(v.symmetric_eigenvalues().min() > 0.0);
        assert!(v[(0, 0)] > v[(3, 3)]);
    }
}
