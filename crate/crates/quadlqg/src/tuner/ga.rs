use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Genetic-algorithm knobs: tournament selection, blend crossover, annealed
/// Gaussian mutation, elitism of one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament: usize,
    /// Initialization box half-width.
    pub init_box: f64,
    /// Blend crossover expansion factor.
    pub blend_alpha: f64,
    /// Initial mutation standard deviation as a fraction of the init box.
    pub mutation_scale: f64,
    /// Per-generation decay factor of the mutation standard deviation.
    pub mutation_anneal: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 50,
            crossover_rate: 0.9,
            mutation_rate: 0.15,
            tournament: 3,
            init_box: 10.0,
            blend_alpha: 0.5,
            mutation_scale: 0.1,
            mutation_anneal: 0.95,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaState {
    dim: usize,
    params: GaParams,
    population: Vec<DVector<f64>>,
    costs: Vec<f64>,
    generation: usize,
    rng: ChaCha12Rng,
}

impl GaState {
    pub fn new(dim: usize, params: &GaParams, seed: u64) -> Self {
        Self {
            dim,
            params: params.clone(),
            population: Vec::new(),
            costs: Vec::new(),
            generation: 0,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn population_size(&self) -> usize {
        self.params.population
    }

    fn tournament_winner(&mut self) -> usize {
        let mut best = self.rng.random_range(0..self.params.population);
        for _ in 1..self.params.tournament.max(1) {
            let rival = self.rng.random_range(0..self.params.population);
            if self.costs[rival] < self.costs[best] {
                best = rival;
            }
        }
        best
    }

    /// Mutation standard deviation at the current generation.
    fn mutation_sigma(&self) -> f64 {
        self.params.mutation_scale
            * self.params.init_box
            * self.params.mutation_anneal.powi(self.generation as i32)
    }

    pub fn ask(&mut self) -> Vec<DVector<f64>> {
        let b = self.params.init_box;
        if self.population.is_empty() {
            self.population = (0..self.params.population)
                .map(|_| DVector::from_fn(self.dim, |_, _| self.rng.random_range(-b..=b)))
                .collect();
            return self.population.clone();
        }
        self.generation += 1;

        let sigma = self.mutation_sigma();
        let elite_idx = (0..self.population.len())
            .min_by(|&a, &b| self.costs[a].partial_cmp(&self.costs[b]).unwrap())
            .unwrap();
        let mut next = Vec::with_capacity(self.params.population);
        next.push(self.population[elite_idx].clone());

        let normal = StandardNormal;
        while next.len() < self.params.population {
            let p1 = self.tournament_winner();
            let p2 = self.tournament_winner();
            let mut child = if self.rng.random::<f64>() < self.params.crossover_rate {
                let alpha = self.params.blend_alpha;
                DVector::from_fn(self.dim, |j, _| {
                    let (a, b) = (self.population[p1][j], self.population[p2][j]);
                    let (lo, hi) = (a.min(b), a.max(b));
                    let d = hi - lo;
                    self.rng.random_range((lo - alpha * d)..=(hi + alpha * d))
                })
            } else {
                self.population[p1].clone()
            };
            for j in 0..self.dim {
                if self.rng.random::<f64>() < self.params.mutation_rate {
                    let step: f64 = normal.sample(&mut self.rng);
                    child[j] += sigma * step;
                }
            }
            next.push(child);
        }
        self.population = next;
        self.population.clone()
    }

    pub fn tell(&mut self, candidates: &[DVector<f64>], costs: &[f64]) {
        assert_eq!(candidates.len(), self.params.population);
        self.costs = costs.to_vec();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_variation_operators_keep_next_generation_inside_current() {
        let params = GaParams {
            population: 10,
            crossover_rate: 0.0,
            mutation_rate: 0.0,
            ..Default::default()
        };
        let mut state = GaState::new(4, &params, 3);
        let first = state.ask();
        let costs: Vec<f64> = first.iter().map(|x| x.norm_squared()).collect();
        state.tell(&first, &costs);
        let second = state.ask();
        for child in &second {
            assert!(first.iter().any(|p| p == child), "child escaped the population");
        }
    }

    #[test]
    fn elite_cost_never_worsens() {
        let params = GaParams { population: 20, ..Default::default() };
        let mut state = GaState::new(6, &params, 11);
        let sphere = |x: &DVector<f64>| x.norm_squared();
        let mut best = f64::INFINITY;
        for _ in 0..40 {
            let cands = state.ask();
            let costs: Vec<f64> = cands.iter().map(sphere).collect();
            let gen_best = costs.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(gen_best <= best + 1e-12, "elite lost: {gen_best} > {best}");
            best = best.min(gen_best);
            state.tell(&cands, &costs);
        }
    }

    #[test]
    fn sphere_reaches_modest_precision() {
        let params = GaParams::default();
        let mut state = GaState::new(5, &params, 23);
        let sphere = |x: &DVector<f64>| x.norm_squared();
        let mut best = f64::INFINITY;
        for _ in 0..200 {
            let cands = state.ask();
            let costs: Vec<f64> = cands.iter().map(sphere).collect();
            best = costs.iter().cloned().fold(best, f64::min);
            state.tell(&cands, &costs);
        }
        assert!(best < 1e-3, "best {best}");
    }
}
