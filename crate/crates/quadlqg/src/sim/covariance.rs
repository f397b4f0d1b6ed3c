use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::riccati::lyapunov::symmetrize;

/// Integrates the differential Lyapunov equation Ṗ = AP + PAᵀ + W from P(0) =
/// `p0` to P(T) with fixed-step RK4, re-symmetrizing after every step.
pub fn propagate_covariance(
    a: &DMatrix<f64>,
    w: &DMatrix<f64>,
    p0: &DMatrix<f64>,
    horizon: f64,
    dt: f64,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || w.nrows() != n || w.ncols() != n || p0.nrows() != n || p0.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p0.nrows() });
    }
    if !(horizon > 0.0 && dt > 0.0 && horizon.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidParameter("horizon and dt must be positive".into()));
    }

    let steps = (horizon / dt).round().max(1.0) as usize;
    let h = horizon / steps as f64;
    let deriv = |p: &DMatrix<f64>| a * p + p * a.transpose() + w;

    let mut p = symmetrize(p0);
    for _ in 0..steps {
        let k1 = deriv(&p);
        let k2 = deriv(&(&p + &k1 * (h / 2.0)));
        let k3 = deriv(&(&p + &k2 * (h / 2.0)));
        let k4 = deriv(&(&p + &k3 * h));
        p = symmetrize(&(&p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)));
    }
    Ok(p)
}
