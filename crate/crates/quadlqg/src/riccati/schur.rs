use nalgebra::{Complex, DMatrix};

type CMatrix = DMatrix<Complex<f64>>;

/// Converts a real Schur pair (Q orthogonal, T quasi-triangular) into a
/// complex Schur pair (Z unitary, T upper triangular) by rotating each 2×2
/// block carrying a conjugate eigenvalue pair.
pub(crate) fn rsf2csf(q: &DMatrix<f64>, t: &DMatrix<f64>) -> (CMatrix, CMatrix) {
    let n = t.nrows();
    let mut tc = t.map(|x| Complex::new(x, 0.0));
    let mut zc = q.map(|x| Complex::new(x, 0.0));

    for m in (1..n).rev() {
        let sub = t[(m, m - 1)].abs();
        if sub > f64::EPSILON * (t[(m - 1, m - 1)].abs() + t[(m, m)].abs()) {
            // Eigenvalue of the 2×2 block, shifted by the lower diagonal entry.
            let a = tc[(m - 1, m - 1)];
            let b = tc[(m - 1, m)];
            let c = tc[(m, m - 1)];
            let d = tc[(m, m)];
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr - det * 4.0).sqrt();
            let lambda = (tr + disc) * 0.5;
            let mu = lambda - d;

            let r = (mu.norm_sqr() + c.norm_sqr()).sqrt();
            if r > 0.0 {
                let gc = mu / r;
                let gs = c / r;
                // G = [[conj(gc), gs], [−gs, gc]] applied to rows m−1, m.
                for j in (m - 1)..n {
                    let top = tc[(m - 1, j)];
                    let bot = tc[(m, j)];
                    tc[(m - 1, j)] = gc.conj() * top + gs * bot;
                    tc[(m, j)] = -gs * top + gc * bot;
                }
                // Gᴴ applied to columns m−1, m.
                for i in 0..(m + 1) {
                    let left = tc[(i, m - 1)];
                    let right = tc[(i, m)];
                    tc[(i, m - 1)] = left * gc + right * gs.conj();
                    tc[(i, m)] = -left * gs + right * gc.conj();
                }
                for i in 0..n {
                    let left = zc[(i, m - 1)];
                    let right = zc[(i, m)];
                    zc[(i, m - 1)] = left * gc + right * gs.conj();
                    zc[(i, m)] = -left * gs + right * gc.conj();
                }
            }
        }
        tc[(m, m - 1)] = Complex::new(0.0, 0.0);
    }
    (zc, tc)
}

/// Swaps the adjacent diagonal entries k, k+1 of an upper-triangular complex
/// Schur form via a unitary rotation, updating Z accordingly.
fn swap_adjacent(z: &mut CMatrix, t: &mut CMatrix, k: usize) {
    let n = t.nrows();
    let t11 = t[(k, k)];
    let t12 = t[(k, k + 1)];
    let t22 = t[(k + 1, k + 1)];
    let d = t22 - t11;
    let r = (t12.norm_sqr() + d.norm_sqr()).sqrt();
    if r == 0.0 {
        return;
    }
    // First column of G is the normalized eigenvector of [[t11,t12],[0,t22]]
    // for t22, so Gᴴ T G moves t22 to the leading position.
    let alpha = t12 / r;
    let beta = d / r;

    // Rows k, k+1 ← Gᴴ · rows.
    for j in k..n {
        let top = t[(k, j)];
        let bot = t[(k + 1, j)];
        t[(k, j)] = alpha.conj() * top + beta.conj() * bot;
        t[(k + 1, j)] = -beta * top + alpha * bot;
    }
    // Columns k, k+1 ← columns · G.
    for i in 0..(k + 2).min(n) {
        let left = t[(i, k)];
        let right = t[(i, k + 1)];
        t[(i, k)] = left * alpha + right * beta;
        t[(i, k + 1)] = -left * beta.conj() + right * alpha.conj();
    }
    for i in 0..n {
        let left = z[(i, k)];
        let right = z[(i, k + 1)];
        z[(i, k)] = left * alpha + right * beta;
        z[(i, k + 1)] = -left * beta.conj() + right * alpha.conj();
    }
    t[(k + 1, k)] = Complex::new(0.0, 0.0);
}

/// Reorders a complex Schur form so that all eigenvalues with negative real
/// part come first. Returns the number of stable eigenvalues.
pub(crate) fn reorder_stable_first(z: &mut CMatrix, t: &mut CMatrix) -> usize {
    let n = t.nrows();
    let stable = |t: &CMatrix, i: usize| t[(i, i)].re < 0.0;
    // Bubble the stable eigenvalues upward; each pass preserves triangularity.
    for _ in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1) {
            if !stable(t, k) && stable(t, k + 1) {
                swap_adjacent(z, t, k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    (0..n).filter(|&i| stable(t, i)).count()
}
