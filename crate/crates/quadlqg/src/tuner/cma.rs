use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// CMA-ES knobs. The population defaults to 4 + ⌊3 ln n⌋ when unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmaParams {
    pub population: Option<usize>,
    pub sigma0: f64,
    /// Per-coordinate standard-deviation scales seeding the covariance as
    /// diag(scales²); `None` starts from the identity. Standard practice when
    /// the warm start exposes known variable magnitudes.
    pub initial_scales: Option<Vec<f64>>,
}

impl Default for CmaParams {
    fn default() -> Self {
        Self { population: None, sigma0: 0.3, initial_scales: None }
    }
}

/// Coordinate scales derived from a warm-start vector: each coordinate's own
/// magnitude, floored so small entries keep a workable search width.
pub fn scales_from_warm_start(warm_start: &[f64], floor: f64) -> Vec<f64> {
    warm_start.iter().map(|x| x.abs().max(floor)).collect()
}

/// Floor applied to covariance eigenvalues when the update loses positive
/// definiteness.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// Full optimizer state of a (μ/μ_w, λ)-CMA-ES run with cumulative step-size
/// adaptation and rank-one plus rank-μ covariance updates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CmaState {
    dim: usize,
    lambda: usize,
    mu: usize,
    weights: DVector<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    p_sigma: DVector<f64>,
    p_c: DVector<f64>,
    eigen_basis: DMatrix<f64>,
    eigen_sqrt: DVector<f64>,
    inv_sqrt: DMatrix<f64>,
    generation: usize,
    /// Number of generations whose covariance needed eigenvalue flooring.
    pub repair_count: u32,
    rng: ChaCha12Rng,
}

impl CmaState {
    pub fn new(mean0: &[f64], params: &CmaParams, seed: u64) -> Self {
        let dim = mean0.len();
        let n = dim as f64;
        let lambda = params.population.unwrap_or(4 + (3.0 * n.ln()).floor() as usize).max(2);
        let mu = lambda / 2;

        // Preliminary weights over the whole population; ranks past μ go
        // negative and feed the active covariance update.
        let raw = DVector::from_fn(lambda, |i, _| {
            ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln()
        });
        let pos_sum: f64 = raw.iter().take(mu).sum();
        let neg_sum_abs: f64 = raw.iter().skip(mu).map(|w| w.abs()).sum();
        let mu_eff = pos_sum * pos_sum / raw.iter().take(mu).map(|w| w * w).sum::<f64>();
        let neg_sq: f64 = raw.iter().skip(mu).map(|w| w * w).sum();
        let mu_eff_neg = if neg_sq > 0.0 {
            let s: f64 = raw.iter().skip(mu).sum();
            s * s / neg_sq
        } else {
            0.0
        };

        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
        let c_mu = (1.0 - c_1)
            .min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        // Scale limits that keep the actively updated covariance PSD.
        let alpha_mu = 1.0 + c_1 / c_mu;
        let alpha_mueff = 1.0 + 2.0 * mu_eff_neg / (mu_eff + 2.0);
        let alpha_pd = (1.0 - c_1 - c_mu) / (n * c_mu);
        let neg_scale = alpha_mu.min(alpha_mueff).min(alpha_pd);

        let weights = DVector::from_fn(lambda, |i, _| {
            if i < mu {
                raw[i] / pos_sum
            } else if neg_sum_abs > 0.0 {
                neg_scale * raw[i] / neg_sum_abs
            } else {
                0.0
            }
        });

        let mut state = Self {
            dim,
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
            mean: DVector::from_column_slice(mean0),
            sigma: params.sigma0,
            cov: DMatrix::identity(dim, dim),
            p_sigma: DVector::zeros(dim),
            p_c: DVector::zeros(dim),
            eigen_basis: DMatrix::identity(dim, dim),
            eigen_sqrt: DVector::repeat(dim, 1.0),
            inv_sqrt: DMatrix::identity(dim, dim),
            generation: 0,
            repair_count: 0,
            rng: ChaCha12Rng::seed_from_u64(seed),
        };
        if let Some(scales) = &params.initial_scales {
            assert_eq!(scales.len(), dim, "initial_scales length must match the dimension");
            for (i, s) in scales.iter().enumerate() {
                state.cov[(i, i)] = s * s;
            }
            state.refresh_eigen();
        }
        state
    }

    pub fn population_size(&self) -> usize {
        self.lambda
    }

    /// Samples one generation of candidates from N(mean, σ²C).
    pub fn ask(&mut self) -> Vec<DVector<f64>> {
        let normal = StandardNormal;
        (0..self.lambda)
            .map(|_| {
                let z = DVector::from_fn(self.dim, |_, _| normal.sample(&mut self.rng));
                let y = &self.eigen_basis * z.component_mul(&self.eigen_sqrt);
                &self.mean + y * self.sigma
            })
            .collect()
    }

    /// Consumes evaluated candidates and adapts mean, paths, step size, and
    /// covariance. Candidates must be the batch returned by the last `ask`.
    pub fn tell(&mut self, candidates: &[DVector<f64>], costs: &[f64]) {
        assert_eq!(candidates.len(), self.lambda);
        assert_eq!(costs.len(), self.lambda);
        self.generation += 1;
        if self.sigma == 0.0 {
            // Degenerate distribution carries no update information.
            return;
        }

        let mut order: Vec<usize> = (0..self.lambda).collect();
        order.sort_by(|&a, &b| costs[a].partial_cmp(&costs[b]).unwrap_or(std::cmp::Ordering::Equal));

        let ranked: Vec<DVector<f64>> = order
            .iter()
            .map(|&i| (&candidates[i] - &self.mean) / self.sigma)
            .collect();
        let mut y_w = DVector::zeros(self.dim);
        for (w, y) in self.weights.iter().take(self.mu).zip(ranked.iter()) {
            y_w += y * *w;
        }

        self.mean += &y_w * self.sigma;

        // Step-size path and control.
        self.p_sigma = &self.p_sigma * (1.0 - self.c_sigma)
            + &self.inv_sqrt * &y_w * (self.c_sigma * (2.0 - self.c_sigma) * self.mu_eff).sqrt();
        let ps_norm = self.p_sigma.norm();
        self.sigma *= ((self.c_sigma / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();

        let expected_decay = 1.0 - (1.0 - self.c_sigma).powi(2 * self.generation as i32);
        let h_sigma = ps_norm / expected_decay.sqrt()
            < (1.4 + 2.0 / (self.dim as f64 + 1.0)) * self.chi_n;

        // Rank-one path.
        let h = if h_sigma { 1.0 } else { 0.0 };
        self.p_c = &self.p_c * (1.0 - self.c_c)
            + &y_w * (h * (self.c_c * (2.0 - self.c_c) * self.mu_eff).sqrt());

        // Covariance: decay, rank-one, rank-μ with active (negative-weight)
        // contributions rescaled onto the current distribution shape.
        let w_sum: f64 = self.weights.iter().sum();
        let decay =
            1.0 - self.c_1 - self.c_mu * w_sum + (1.0 - h) * self.c_1 * self.c_c * (2.0 - self.c_c);
        let mut cov = &self.cov * decay + &self.p_c * self.p_c.transpose() * self.c_1;
        for (w, y) in self.weights.iter().zip(ranked.iter()) {
            let scale = if *w >= 0.0 {
                *w
            } else {
                let whitened = &self.inv_sqrt * y;
                *w * self.dim as f64 / whitened.norm_squared().max(1e-300)
            };
            cov += y * y.transpose() * (self.c_mu * scale);
        }
        self.cov = (&cov + cov.transpose()) * 0.5;

        self.refresh_eigen();
    }

    fn refresh_eigen(&mut self) {
        let eig = self.cov.clone().symmetric_eigen();
        let mut repaired = false;
        let floored = eig.eigenvalues.map(|l| {
            if l < EIGEN_FLOOR {
                repaired = true;
                EIGEN_FLOOR
            } else {
                l
            }
        });
        if repaired {
            self.repair_count += 1;
            self.cov = &eig.eigenvectors
                * DMatrix::from_diagonal(&floored)
                * eig.eigenvectors.transpose();
        }
        self.eigen_basis = eig.eigenvectors;
        self.eigen_sqrt = floored.map(f64::sqrt);
        let inv_diag = DMatrix::from_diagonal(&floored.map(|l| 1.0 / l.sqrt()));
        self.inv_sqrt = &self.eigen_basis * inv_diag * self.eigen_basis.transpose();
    }

    /// Condition number of the adapted covariance.
    pub fn covariance_condition(&self) -> f64 {
        let max = self.eigen_sqrt.max();
        let min = self.eigen_sqrt.min();
        (max / min).powi(2)
    }
}
