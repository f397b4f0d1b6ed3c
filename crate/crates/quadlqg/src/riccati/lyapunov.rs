use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest eigenvalue real part, via the complex spectrum.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Solves A P + P Aᵀ = −W by direct elimination on the Kronecker system
/// (I ⊗ A + A ⊗ I) vec(P) = −vec(W). No stability check; the caller owns it.
pub(crate) fn lyapunov_unchecked(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let system = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = DMatrix::from_column_slice(n * n, 1, w.as_slice()).map(|x| -x);
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::NoConvergence { residual: f64::INFINITY })?;
    let p = DMatrix::from_column_slice(n, n, solution.as_slice());
    Ok(symmetrize(&p))
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Steady-state solution of the continuous Lyapunov equation
/// A P + P Aᵀ + W = 0 for Hurwitz A.
pub fn solve_lyapunov(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if w.nrows() != n || w.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.nrows() });
    }
    if !a.iter().all(|x| x.is_finite()) || !w.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("Lyapunov operands"));
    }
    let max_real = spectral_abscissa(a);
    if max_real >= 0.0 {
        return Err(Error::NotHurwitz { max_real });
    }
    let p = lyapunov_unchecked(a, w)?;
    let residual = (a * &p + &p * a.transpose() + w).norm();
    if residual > 1e-10 * (1.0 + p.norm()) {
        return Err(Error::NoConvergence { residual });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn scalar_case() {
        let a = DMatrix::from_element(1, 1, -1.0);
        let w = DMatrix::from_element(1, 1, 2.0);
        let p = solve_lyapunov(&a, &w).unwrap();
        assert!((p[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negative_identity_case() {
        let a = DMatrix::<f64>::identity(3, 3) * -1.0;
        let w = DMatrix::<f64>::identity(3, 3);
        let p = solve_lyapunov(&a, &w).unwrap();
        assert!((p - DMatrix::<f64>::identity(3, 3) * 0.5).norm() < 1e-13);
    }

    #[test]
    fn rejects_unstable_a() {
        let a = DMatrix::from_element(1, 1, 0.5);
        let w = DMatrix::from_element(1, 1, 1.0);
        assert!(matches!(solve_lyapunov(&a, &w), Err(Error::NotHurwitz { .. })));
    }

    #[test]
    fn random_hurwitz_systems_meet_residual_bound() {
        let mut state = 0x2545f4914f6cdd1du64;
        for n in [2usize, 5, 8, 12] {
            for _ in 0..10 {
                // Shifted random matrix is Hurwitz with high margin.
                let mut a = DMatrix::from_fn(n, n, |_, _| lcg(&mut state));
                for i in 0..n {
                    a[(i, i)] -= 3.0 + n as f64 * 0.5;
                }
                let root = DMatrix::from_fn(n, n, |_, _| lcg(&mut state));
                let w = &root * root.transpose();
                let p = solve_lyapunov(&a, &w).unwrap();
                let residual = (&a * &p + &p * a.transpose() + &w).norm();
                assert!(residual <= 1e-10 * (1.0 + p.norm()), "n={n} residual {residual}");
                // Solution of a Lyapunov equation with PSD forcing is PSD.
                let min_eig = p.symmetric_eigenvalues().min();
                assert!(min_eig >= -1e-10, "min eigenvalue {min_eig}");
            }
        }
    }
}
