use nalgebra::SVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{INPUT_DIM, STATE_DIM};
use crate::error::{Error, Result};
use crate::riccati::LqgWeights;

use super::objective::TuningContext;

/// One cell of the 2-d cost slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    /// Isotropic weight on the position block of Q.
    pub q_scale: f64,
    /// Isotropic weight on R.
    pub r_scale: f64,
    pub cost: f64,
}

/// Logarithmically spaced grid between two positive bounds, inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grid bounds must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

fn cell_weights(ctx: &TuningContext, q_scale: f64, r_scale: f64) -> Result<LqgWeights> {
    let mut q_diag = SVector::<f64, STATE_DIM>::repeat(1.0);
    for i in 0..3 {
        q_diag[i] = q_scale;
    }
    let r_diag = SVector::<f64, INPUT_DIM>::repeat(r_scale);
    Ok(LqgWeights::from_qr_diag(&q_diag, &r_diag)?
        .with_noise(ctx.process_noise, ctx.measurement_noise))
}

/// Sweeps the outer cost over a 2-d slice of the weight space: the position
/// block of Q and the whole of R move isotropically while every other weight
/// holds at its default of one. Cells evaluate in parallel; output order is
/// row-major with `q_scales` outermost.
pub fn landscape_scan(
    ctx: &TuningContext,
    q_scales: &[f64],
    r_scales: &[f64],
) -> Result<Vec<LandscapePoint>> {
    for s in q_scales.iter().chain(r_scales.iter()) {
        if !(s.is_finite() && *s > 0.0) {
            return Err(Error::InvalidParameter("grid scales must be positive".into()));
        }
    }
    let cells: Vec<(f64, f64)> = q_scales
        .iter()
        .flat_map(|&q| r_scales.iter().map(move |&r| (q, r)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(q_scale, r_scale)| {
            let cost = match cell_weights(ctx, q_scale, r_scale) {
                Ok(w) => ctx.evaluate_weights(&w),
                Err(_) => crate::sim::divergence_penalty(ctx.sim.horizon, 0.0),
            };
            LandscapePoint { q_scale, r_scale, cost }
        })
        .collect())
}

/// Counts grid cells whose cost is strictly below every existing neighbor in
/// the 8-neighborhood. Flat plateaus (ties) do not count.
pub fn count_grid_local_minima(points: &[LandscapePoint], nq: usize, nr: usize) -> usize {
    assert_eq!(points.len(), nq * nr);
    let cost = |i: usize, j: usize| points[i * nr + j].cost;
    let mut count = 0;
    for i in 0..nq {
        for j in 0..nr {
            let c = cost(i, j);
            let mut is_min = true;
            'scan: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= nq as i64 || nj >= nr as i64 {
                        continue;
                    }
                    if cost(ni as usize, nj as usize) <= c {
                        is_min = false;
                        break 'scan;
                    }
                }
            }
            if is_min {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints_and_spacing() {
        let g = log_grid(1e-2, 1e2, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 1e-2).abs() < 1e-12);
        assert!((g[4] - 1e2).abs() < 1e-9);
        assert!((g[2] - 1.0).abs() < 1e-9);
        assert!(log_grid(-1.0, 1.0, 5).is_err());
        assert!(log_grid(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn local_minimum_detection_on_a_synthetic_surface() {
        // 3×3 with a pit in the middle, plus a flat plateau elsewhere.
        let mut pts = Vec::new();
        let costs = [[5.0, 4.0, 5.0], [4.0, 1.0, 4.0], [5.0, 4.0, 5.0]];
        for (i, row) in costs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                pts.push(LandscapePoint { q_scale: i as f64, r_scale: j as f64, cost: c });
            }
        }
        assert_eq!(count_grid_local_minima(&pts, 3, 3), 1);

        let flat: Vec<LandscapePoint> = (0..9)
            .map(|k| LandscapePoint { q_scale: 0.0, r_scale: k as f64, cost: 2.0 })
            .collect();
        assert_eq!(count_grid_local_minima(&flat, 3, 3), 0);
    }
}
