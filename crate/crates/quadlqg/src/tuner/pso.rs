use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Particle swarm knobs: constriction-style defaults, search box ±bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub particles: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub bound: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { particles: 30, inertia: 0.7298, cognitive: 1.49618, social: 1.49618, bound: 10.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsoState {
    dim: usize,
    params: PsoParams,
    positions: Vec<DVector<f64>>,
    velocities: Vec<DVector<f64>>,
    personal_best: Vec<DVector<f64>>,
    personal_best_cost: Vec<f64>,
    global_best: DVector<f64>,
    global_best_cost: f64,
    initialized: bool,
    rng: ChaCha12Rng,
}

impl PsoState {
    pub fn new(dim: usize, params: &PsoParams, seed: u64) -> Self {
        Self {
            dim,
            params: params.clone(),
            positions: Vec::new(),
            velocities: Vec::new(),
            personal_best: Vec::new(),
            personal_best_cost: Vec::new(),
            global_best: DVector::zeros(dim),
            global_best_cost: f64::INFINITY,
            initialized: false,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn population_size(&self) -> usize {
        self.params.particles
    }

    pub fn global_best(&self) -> (&DVector<f64>, f64) {
        (&self.global_best, self.global_best_cost)
    }

    /// First call scatters the swarm uniformly over the box; later calls run
    /// the inertia/cognitive/social velocity update with velocity clamping.
    pub fn ask(&mut self) -> Vec<DVector<f64>> {
        let b = self.params.bound;
        if !self.initialized {
            self.positions = (0..self.params.particles)
                .map(|_| DVector::from_fn(self.dim, |_, _| self.rng.random_range(-b..=b)))
                .collect();
            self.velocities =
                (0..self.params.particles).map(|_| DVector::zeros(self.dim)).collect();
            self.personal_best = self.positions.clone();
            self.personal_best_cost = vec![f64::INFINITY; self.params.particles];
            self.initialized = true;
            return self.positions.clone();
        }

        let vmax = 2.0 * b;
        for i in 0..self.params.particles {
            for j in 0..self.dim {
                let r1: f64 = self.rng.random();
                let r2: f64 = self.rng.random();
                let v = self.params.inertia * self.velocities[i][j]
                    + self.params.cognitive * r1 * (self.personal_best[i][j] - self.positions[i][j])
                    + self.params.social * r2 * (self.global_best[j] - self.positions[i][j]);
                self.velocities[i][j] = v.clamp(-vmax, vmax);
                self.positions[i][j] = (self.positions[i][j] + self.velocities[i][j]).clamp(-b, b);
            }
        }
        self.positions.clone()
    }

    pub fn tell(&mut self, candidates: &[DVector<f64>], costs: &[f64]) {
        assert_eq!(candidates.len(), self.params.particles);
        for i in 0..self.params.particles {
            if costs[i] < self.personal_best_cost[i] {
                self.personal_best_cost[i] = costs[i];
                self.personal_best[i] = candidates[i].clone();
            }
            if costs[i] < self.global_best_cost {
                self.global_best_cost = costs[i];
                self.global_best = candidates[i].clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_coefficients_leave_particles_stationary() {
        let params = PsoParams { inertia: 0.0, cognitive: 0.0, social: 0.0, ..Default::default() };
        let mut state = PsoState::new(4, &params, 5);
        let first = state.ask();
        let costs: Vec<f64> = first.iter().map(|x| x.norm_squared()).collect();
        state.tell(&first, &costs);
        let second = state.ask();
        assert_eq!(first, second);
    }

    #[test]
    fn single_particle_at_global_best_stays_there() {
        let params = PsoParams { particles: 1, ..Default::default() };
        let mut state = PsoState::new(3, &params, 2);
        let first = state.ask();
        state.tell(&first, &[1.0]);
        // Particle == personal best == global best, velocity zero.
        for _ in 0..5 {
            let batch = state.ask();
            assert_eq!(batch[0], first[0]);
            state.tell(&batch, &[1.0]);
        }
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let params = PsoParams::default();
        let mut a = PsoState::new(6, &params, 42);
        let mut b = PsoState::new(6, &params, 42);
        for _ in 0..3 {
            let ca = a.ask();
            let cb = b.ask();
            assert_eq!(ca, cb);
            let costs: Vec<f64> = ca.iter().map(|x| x.norm_squared()).collect();
            a.tell(&ca, &costs);
            b.tell(&cb, &costs);
        }
    }

    #[test]
    fn swarm_contracts_on_the_sphere() {
        let params = PsoParams { bound: 5.0, ..Default::default() };
        let mut state = PsoState::new(5, &params, 17);
        for _ in 0..150 {
            let cands = state.ask();
            let costs: Vec<f64> = cands.iter().map(|x| x.norm_squared()).collect();
            state.tell(&cands, &costs);
        }
        assert!(state.global_best().1 < 1e-4, "best {}", state.global_best().1);
    }
}
