use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::cma::{CmaParams, CmaState};
use super::ga::{GaParams, GaState};
use super::objective::ObjectiveFn;
use super::pso::{PsoParams, PsoState};

/// The optimizer menu: CMA-ES, particle swarm, genetic algorithm, Bryson's
/// rule, and a fixed manually supplied weight set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Cma,
    Pso,
    Ga,
    Bryson,
    Manual,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Cma => "CMA",
            Method::Pso => "PS",
            Method::Ga => "GA",
            Method::Bryson => "BR",
            Method::Manual => "MT",
        }
    }

    /// Closed-form baselines evaluate exactly one candidate.
    pub fn is_single_shot(&self) -> bool {
        matches!(self, Method::Bryson | Method::Manual)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CMA" | "CMA-ES" | "CMAES" => Ok(Method::Cma),
            "PS" | "PSO" => Ok(Method::Pso),
            "GA" => Ok(Method::Ga),
            "BR" | "BRYSON" => Ok(Method::Bryson),
            "MT" | "MANUAL" => Ok(Method::Manual),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outer-loop configuration shared by all methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Evaluation budget; generations stop once another full one cannot fit.
    pub budget: usize,
    pub seed: u64,
    /// Convergence tolerance ε on the outer cost.
    pub tolerance: f64,
    pub cma: CmaParams,
    pub pso: PsoParams,
    pub ga: GaParams,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::Cma,
            budget: 2000,
            seed: 0,
            tolerance: 0.05,
            cma: CmaParams::default(),
            pso: PsoParams::default(),
            ga: GaParams::default(),
        }
    }
}

/// Population cost statistics of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStat {
    pub best: f64,
    pub mean: f64,
    pub std: f64,
}

/// Outcome of a tuning run. `wall_time_secs` is runtime telemetry and stays
/// out of serialized artifacts so outputs are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub method: Method,
    pub best_theta: Vec<f64>,
    pub best_cost: f64,
    pub evaluations: usize,
    /// Best-so-far cost after each generation; monotone non-increasing.
    pub best_trace: Vec<f64>,
    pub generation_stats: Vec<GenerationStat>,
    pub converged: bool,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum MethodState {
    Cma(CmaState),
    Pso(PsoState),
    Ga(GaState),
    /// Bryson and manual baselines: one candidate, one evaluation.
    Single { candidate: Vec<f64>, done: bool },
}

/// Stepwise tuning driver. The whole struct serializes, including optimizer
/// RNG state, so a run can checkpoint after any generation and resume to a
/// bit-identical result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuneRunner {
    pub config: OptimizerConfig,
    state: MethodState,
    pub evaluations: usize,
    pub best_theta: Vec<f64>,
    pub best_cost: f64,
    pub best_trace: Vec<f64>,
    pub generation_stats: Vec<GenerationStat>,
    pub converged: bool,
}

impl TuneRunner {
    /// `warm_start` seeds the CMA mean and is the single candidate of the
    /// Bryson/manual baselines; its length fixes the search dimension.
    pub fn new(config: OptimizerConfig, warm_start: &[f64]) -> Result<Self> {
        if config.tolerance <= 0.0 {
            return Err(Error::InvalidParameter("tolerance must be > 0".into()));
        }
        let dim = warm_start.len();
        let state = match config.method {
            Method::Cma => MethodState::Cma(CmaState::new(warm_start, &config.cma, config.seed)),
            Method::Pso => MethodState::Pso(PsoState::new(dim, &config.pso, config.seed)),
            Method::Ga => MethodState::Ga(GaState::new(dim, &config.ga, config.seed)),
            Method::Bryson | Method::Manual => {
                MethodState::Single { candidate: warm_start.to_vec(), done: false }
            }
        };
        let runner = Self {
            config,
            state,
            evaluations: 0,
            best_theta: warm_start.to_vec(),
            best_cost: f64::INFINITY,
            best_trace: Vec::new(),
            generation_stats: Vec::new(),
            converged: false,
        };
        let pop = runner.population();
        if runner.config.budget < pop {
            return Err(Error::InvalidParameter(format!(
                "budget {} is below one generation of {}",
                runner.config.budget, pop
            )));
        }
        Ok(runner)
    }

    pub fn population(&self) -> usize {
        match &self.state {
            MethodState::Cma(s) => s.population_size(),
            MethodState::Pso(s) => s.population_size(),
            MethodState::Ga(s) => s.population_size(),
            MethodState::Single { .. } => 1,
        }
    }

    pub fn is_done(&self) -> bool {
        if self.converged {
            return true;
        }
        match &self.state {
            MethodState::Single { done, .. } => *done,
            _ => self.evaluations + self.population() > self.config.budget,
        }
    }

    /// Runs one generation: sample, score in parallel (costs are gathered by
    /// candidate index, so scheduling cannot affect the outcome), update.
    pub fn step(&mut self, objective: &dyn ObjectiveFn) -> Result<()> {
        if self.is_done() {
            return Ok(());
        }
        let candidates: Vec<DVector<f64>> = match &mut self.state {
            MethodState::Cma(s) => s.ask(),
            MethodState::Pso(s) => s.ask(),
            MethodState::Ga(s) => s.ask(),
            MethodState::Single { candidate, .. } => {
                vec![DVector::from_column_slice(candidate)]
            }
        };
        let costs: Vec<f64> =
            candidates.par_iter().map(|c| objective.eval(c.as_slice())).collect();
        self.evaluations += candidates.len();

        match &mut self.state {
            MethodState::Cma(s) => s.tell(&candidates, &costs),
            MethodState::Pso(s) => s.tell(&candidates, &costs),
            MethodState::Ga(s) => s.tell(&candidates, &costs),
            MethodState::Single { done, .. } => *done = true,
        }

        for (cand, &cost) in candidates.iter().zip(costs.iter()) {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best_theta = cand.as_slice().to_vec();
            }
        }
        let n = costs.len() as f64;
        let mean = costs.iter().sum::<f64>() / n;
        let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
        self.generation_stats.push(GenerationStat {
            best: costs.iter().cloned().fold(f64::INFINITY, f64::min),
            mean,
            std: var.sqrt(),
        });
        self.best_trace.push(self.best_cost);

        if self.best_cost < self.config.tolerance {
            self.converged = true;
        }
        Ok(())
    }

    pub fn run(&mut self, objective: &dyn ObjectiveFn) -> Result<()> {
        while !self.is_done() {
            self.step(objective)?;
        }
        Ok(())
    }

    pub fn result(&self) -> TuneResult {
        TuneResult {
            method: self.config.method,
            best_theta: self.best_theta.clone(),
            best_cost: self.best_cost,
            evaluations: self.evaluations,
            best_trace: self.best_trace.clone(),
            generation_stats: self.generation_stats.clone(),
            converged: self.converged,
            wall_time_secs: 0.0,
        }
    }

    pub fn to_checkpoint(&self) -> String {
        serde_json::to_string(self).expect("runner state serializes")
    }

    pub fn from_checkpoint(json: &str) -> Result<Self> {
        serde_json::from_str(json)
            .map_err(|e| Error::InvalidParameter(format!("bad checkpoint: {e}")))
    }
}

/// Runs the configured method until its budget is exhausted or the outer cost
/// drops below tolerance; returns the best candidate ever evaluated.
pub fn tune(
    config: OptimizerConfig,
    objective: &dyn ObjectiveFn,
    warm_start: &[f64],
) -> Result<TuneResult> {
    if warm_start.len() != objective.dim() {
        return Err(Error::DimensionMismatch {
            expected: objective.dim(),
            got: warm_start.len(),
        });
    }
    let started = Instant::now();
    let mut runner = TuneRunner::new(config, warm_start)?;
    runner.run(objective)?;
    let mut result = runner.result();
    result.wall_time_secs = started.elapsed().as_secs_f64();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Sphere {
        dim: usize,
    }

    impl ObjectiveFn for Sphere {
        fn dim(&self) -> usize {
            self.dim
        }
        fn eval(&self, theta: &[f64]) -> f64 {
            theta.iter().map(|x| x * x).sum()
        }
    }

    #[test]
    fn manual_method_spends_exactly_one_evaluation() {
        let cfg = OptimizerConfig {
            method: Method::Manual,
            budget: 100,
            tolerance: 1e-12,
            ..Default::default()
        };
        let obj = Sphere { dim: 4 };
        let start = vec![0.5, -0.5, 0.25, 0.0];
        let result = tune(cfg, &obj, &start).unwrap();
        assert_eq!(result.evaluations, 1);
        assert_eq!(result.best_theta, start);
        assert!((result.best_cost - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn budget_below_one_generation_is_rejected() {
        let cfg = OptimizerConfig { method: Method::Ga, budget: 10, ..Default::default() };
        assert!(TuneRunner::new(cfg, &[0.0; 5]).is_err());
    }

    #[test]
    fn trace_is_monotone_and_budget_respected() {
        for method in [Method::Cma, Method::Pso, Method::Ga] {
            let cfg = OptimizerConfig {
                method,
                budget: 600,
                seed: 5,
                tolerance: 1e-16,
                ..Default::default()
            };
            let obj = Sphere { dim: 6 };
            let result = tune(cfg, &obj, &vec![2.0; 6]).unwrap();
            assert!(result.evaluations <= 600, "{method}: {}", result.evaluations);
            for w in result.best_trace.windows(2) {
                assert!(w[1] <= w[0], "{method}: trace increased");
            }
            assert_eq!(result.best_trace.len(), result.generation_stats.len());
        }
    }

    #[test]
    fn identical_seeds_reproduce_identical_results() {
        let cfg = OptimizerConfig {
            method: Method::Cma,
            budget: 300,
            seed: 123,
            tolerance: 1e-16,
            ..Default::default()
        };
        let obj = Sphere { dim: 5 };
        let a = tune(cfg.clone(), &obj, &vec![1.0; 5]).unwrap();
        let b = tune(cfg, &obj, &vec![1.0; 5]).unwrap();
        assert_eq!(a.best_theta, b.best_theta);
        assert_eq!(a.best_trace, b.best_trace);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn checkpoint_resume_matches_uninterrupted_run() {
        let cfg = OptimizerConfig {
            method: Method::Cma,
            budget: 400,
            seed: 31,
            tolerance: 1e-16,
            ..Default::default()
        };
        let obj = Sphere { dim: 5 };

        let mut straight = TuneRunner::new(cfg.clone(), &vec![1.5; 5]).unwrap();
        straight.run(&obj).unwrap();

        let mut first_half = TuneRunner::new(cfg, &vec![1.5; 5]).unwrap();
        for _ in 0..3 {
            first_half.step(&obj).unwrap();
        }
        let checkpoint = first_half.to_checkpoint();
        drop(first_half);
        let mut resumed = TuneRunner::from_checkpoint(&checkpoint).unwrap();
        resumed.run(&obj).unwrap();

        assert_eq!(straight.best_theta, resumed.best_theta);
        assert_eq!(straight.best_trace, resumed.best_trace);
        assert_eq!(straight.evaluations, resumed.evaluations);
    }

    #[test]
    fn convergence_tolerance_stops_early() {
        let cfg = OptimizerConfig {
            method: Method::Cma,
            budget: 100_000,
            seed: 2,
            tolerance: 1e-3,
            ..Default::default()
        };
        let obj = Sphere { dim: 4 };
        let result = tune(cfg, &obj, &vec![1.0; 4]).unwrap();
        assert!(result.converged);
        assert!(result.best_cost < 1e-3);
        assert!(result.evaluations < 100_000);
    }
}
