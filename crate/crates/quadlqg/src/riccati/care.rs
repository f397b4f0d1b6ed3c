use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

use super::lyapunov::{lyapunov_unchecked, spectral_abscissa, symmetrize};
use super::schur::{reorder_stable_first, rsf2csf};

/// Eigenvalues of the Hamiltonian closer than this to the imaginary axis are
/// treated as a stabilizability/detectability failure.
pub const IMAG_AXIS_TOL: f64 = 1e-9;
/// Newton–Kleinman refinement cap.
const MAX_REFINEMENTS: usize = 100;
/// Relative residual target for the Riccati solution.
const RESIDUAL_TOL: f64 = 1e-9;

/// Stabilizing solution of a continuous algebraic Riccati equation.
#[derive(Debug, Clone)]
pub struct CareSolution {
    /// Symmetric PSD solution of AᵀP + PA − PBR⁻¹BᵀP + Q = 0.
    pub p: DMatrix<f64>,
    /// Feedback gain R⁻¹BᵀP; A − B·gain is Hurwitz.
    pub gain: DMatrix<f64>,
    /// Frobenius norm of the final Riccati residual.
    pub residual: f64,
}

fn riccati_residual(
    a: &DMatrix<f64>,
    g: &DMatrix<f64>,
    q: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> f64 {
    (a.transpose() * p + p * a - p * g * p + q).norm()
}

/// Solves AᵀP + PA − PBR⁻¹BᵀP + Q = 0 for the stabilizing P and the
/// associated gain K = R⁻¹BᵀP.
///
/// The 2n×2n Hamiltonian is reduced to complex Schur form, its stable
/// invariant subspace extracted, and the resulting P polished with
/// Newton–Kleinman steps (each one a Lyapunov solve on the closed loop).
pub fn solve_care(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<CareSolution> {
    let n = a.nrows();
    let k = b.ncols();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if b.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
    }
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.nrows() });
    }
    if r.nrows() != k || r.ncols() != k {
        return Err(Error::DimensionMismatch { expected: k, got: r.nrows() });
    }
    for m in [a, b, q, r] {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("Riccati operands"));
        }
    }

    let q = symmetrize(q);
    let r_chol = r
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("control weight R"))?;
    // G = B R⁻¹ Bᵀ
    let g = symmetrize(&(b * r_chol.solve(&b.transpose())));

    let mut ham = DMatrix::<f64>::zeros(2 * n, 2 * n);
    ham.view_mut((0, 0), (n, n)).copy_from(a);
    ham.view_mut((0, n), (n, n)).copy_from(&(-&g));
    ham.view_mut((n, 0), (n, n)).copy_from(&(-&q));
    ham.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let schur = ham.clone().try_schur(f64::EPSILON, 200_000).ok_or(Error::SchurFailed)?;
    let (qmat, tmat) = schur.unpack();
    let (mut zc, mut tc) = rsf2csf(&qmat, &tmat);

    let scale = 1.0 + ham.norm();
    for i in 0..2 * n {
        if tc[(i, i)].re.abs() <= IMAG_AXIS_TOL * scale {
            return Err(Error::NotStabilizable);
        }
    }
    let stable_count = reorder_stable_first(&mut zc, &mut tc);
    if stable_count != n {
        return Err(Error::NotStabilizable);
    }

    // Basis of the stable invariant subspace: [X1; X2]. P = Re(X2 X1⁻¹),
    // obtained from X1ᵀ Pᵀ = X2ᵀ.
    let x1 = zc.view((0, 0), (n, n)).clone_owned();
    let x2 = zc.view((n, 0), (n, n)).clone_owned();
    let pt = x1
        .transpose()
        .lu()
        .solve(&x2.transpose())
        .ok_or(Error::NotStabilizable)?;
    let mut p = symmetrize(&pt.map(|c: Complex<f64>| c.re).transpose());

    // Newton–Kleinman polish: at least one step, then iterate while the
    // residual keeps improving or exceeds tolerance.
    let mut residual = riccati_residual(a, &g, &q, &p);
    let tol = RESIDUAL_TOL * (1.0 + p.norm());
    for _ in 0..MAX_REFINEMENTS {
        let gain = r_chol.solve(&(b.transpose() * &p));
        let a_cl = a - b * &gain;
        let forcing = &q + gain.transpose() * r * &gain;
        let refined = match lyapunov_unchecked(&a_cl.transpose(), &forcing) {
            Ok(m) => m,
            Err(_) => break,
        };
        let refined_residual = riccati_residual(a, &g, &q, &refined);
        if refined_residual < residual {
            p = refined;
            residual = refined_residual;
        } else {
            break;
        }
        if residual <= 0.1 * tol {
            break;
        }
    }

    let tol = RESIDUAL_TOL * (1.0 + p.norm());
    if residual > tol {
        return Err(Error::NoConvergence { residual });
    }

    let gain = r_chol.solve(&(b.transpose() * &p));
    let max_real = spectral_abscissa(&(a - b * &gain));
    if max_real >= 0.0 {
        return Err(Error::NotStabilizable);
    }

    Ok(CareSolution { p, gain, residual })
}

/// Steady-state Kalman solution for ẋ = Ax + w, y = Cx + v with process
/// covariance W and measurement covariance V.
///
/// By duality this is the control Riccati solve on (Aᵀ, Cᵀ); V is nudged to
/// positive definite before inversion since the noise model only requires
/// V ⪰ 0. Returns (P, L) with L = P Cᵀ V⁻¹ and A − LC Hurwitz.
pub fn solve_kalman(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    w: &DMatrix<f64>,
    v: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = v.nrows();
    let v_reg = v + DMatrix::<f64>::identity(m, m) * 1e-12;
    let dual = solve_care(&a.transpose(), &c.transpose(), w, &v_reg)?;
    let l = dual.gain.transpose();
    Ok((dual.p, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn scalar_analytic_root() {
        // −P² + 1 = 0 → P = 1, K = 1.
        let a = DMatrix::from_element(1, 1, 0.0);
        let b = DMatrix::from_element(1, 1, 1.0);
        let q = DMatrix::from_element(1, 1, 1.0);
        let r = DMatrix::from_element(1, 1, 1.0);
        let sol = solve_care(&a, &b, &q, &r).unwrap();
        assert!((sol.p[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((sol.gain[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_integrator_analytic_gain() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let q = DMatrix::<f64>::identity(2, 2);
        let r = DMatrix::from_element(1, 1, 1.0);
        let sol = solve_care(&a, &b, &q, &r).unwrap();
        assert!(sol.residual <= 1e-12 * (1.0 + sol.p.norm()));
        assert!((sol.gain[(0, 0)] - 1.0).abs() < 1e-10);
        assert!((sol.gain[(0, 1)] - 3.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn random_stabilizable_systems() {
        let mut state = 0x243f6a8885a308d3u64;
        for trial in 0..50 {
            let n = 2 + (trial % 11);
            let k = 1 + (trial % 3);
            let a = DMatrix::from_fn(n, n, |_, _| lcg(&mut state));
            let b = DMatrix::from_fn(n, k, |_, _| lcg(&mut state));
            let q = DMatrix::<f64>::identity(n, n);
            let r = DMatrix::<f64>::identity(k, k);
            let sol = solve_care(&a, &b, &q, &r).unwrap();
            let res = sol.residual;
            assert!(res <= 1e-9 * (1.0 + sol.p.norm()), "trial {trial} residual {res}");
            let abscissa = spectral_abscissa(&(&a - &b * &sol.gain));
            assert!(abscissa < 0.0, "trial {trial} not Hurwitz: {abscissa}");
            let min_eig = sol.p.symmetric_eigenvalues().min();
            assert!(min_eig >= -1e-8 * (1.0 + sol.p.norm()), "trial {trial} P not PSD");
        }
    }

    #[test]
    fn rejects_unstabilizable_pair() {
        // Unstable mode with no control authority.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let q = DMatrix::<f64>::identity(2, 2);
        let r = DMatrix::from_element(1, 1, 1.0);
        assert!(solve_care(&a, &b, &q, &r).is_err());
    }

    #[test]
    fn gain_invariant_under_joint_weight_scaling() {
        let mut state = 0x13198a2e03707344u64;
        let n = 6;
        let a = DMatrix::from_fn(n, n, |_, _| lcg(&mut state));
        let b = DMatrix::from_fn(n, 2, |_, _| lcg(&mut state));
        let q = DMatrix::<f64>::identity(n, n);
        let r = DMatrix::<f64>::identity(2, 2);
        let base = solve_care(&a, &b, &q, &r).unwrap();
        let scaled = solve_care(&a, &b, &(q * 37.5), &(r * 37.5)).unwrap();
        let diff = (&base.gain - &scaled.gain).norm();
        assert!(diff <= 1e-9 * (1.0 + base.gain.norm()), "gain drift {diff}");
    }

    #[test]
    fn kalman_matches_dual_care() {
        let mut state = 0xa4093822299f31d0u64;
        let n = 5;
        let a = DMatrix::from_fn(n, n, |_, _| lcg(&mut state));
        let c = DMatrix::from_fn(2, n, |_, _| lcg(&mut state));
        let w = DMatrix::<f64>::identity(n, n);
        let v = DMatrix::<f64>::identity(2, 2);
        let (p_est, l) = solve_kalman(&a, &c, &w, &v).unwrap();
        let v_reg = &v + DMatrix::<f64>::identity(2, 2) * 1e-12;
        let dual = solve_care(&a.transpose(), &c.transpose(), &w, &v_reg).unwrap();
        assert!((&p_est - &dual.p).norm() <= 1e-12 * (1.0 + dual.p.norm()));
        let abscissa = spectral_abscissa(&(&a - &l * &c));
        assert!(abscissa < 0.0);
    }

    #[test]
    fn scalar_kalman_root() {
        let a = DMatrix::from_element(1, 1, 0.0);
        let c = DMatrix::from_element(1, 1, 1.0);
        let w = DMatrix::from_element(1, 1, 1.0);
        let v = DMatrix::from_element(1, 1, 1.0);
        let (p, l) = solve_kalman(&a, &c, &w, &v).unwrap();
        assert!((p[(0, 0)] - 1.0).abs() < 1e-9);
        assert!((l[(0, 0)] - 1.0).abs() < 1e-9);
    }
}
