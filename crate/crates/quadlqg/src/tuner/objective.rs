use serde::{Deserialize, Serialize};

use crate::dynamics::{LinearModel, QuadrotorParams};
use crate::riccati::{synthesize_gains, LqgWeights, QMatrix, VMatrix, PARAM_DIM};
use crate::sim::{divergence_penalty, online_outer_cost, simulate, SimConfig};

/// A black-box cost over a flat parameter vector. `eval` must be pure so
/// generations can be scored in parallel.
pub trait ObjectiveFn: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, theta: &[f64]) -> f64;
}

/// Everything a candidate evaluation needs: the plant, the hover model, the
/// rollout configuration (whose seed is shared by all candidates of a run),
/// the outer-cost weight, and the noise model driving the Kalman design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuningContext {
    pub model: LinearModel,
    pub params: QuadrotorParams,
    pub sim: SimConfig,
    pub lambda: f64,
    /// Noise model driving the Kalman design; must stay PD for the estimator
    /// Riccati equation to admit a stabilizing solution.
    pub process_noise: QMatrix,
    pub measurement_noise: VMatrix,
    /// Whether rollouts actually inject the modeled noise. Disabled for
    /// deterministic evaluations such as landscape scans.
    pub inject_noise: bool,
}

impl TuningContext {
    /// Scores one already-built weight set: synthesize the gains, roll out,
    /// and integrate the outer cost. Synthesis failures and diverged rollouts
    /// come back as finite penalties so population methods can rank them.
    pub fn evaluate_weights(&self, weights: &LqgWeights) -> f64 {
        let gains = match synthesize_gains(&self.model, weights) {
            Ok(g) => g,
            Err(_) => return divergence_penalty(self.sim.horizon, 0.0),
        };
        let rollout_weights = if self.inject_noise {
            weights.clone()
        } else {
            weights.clone().with_noise(QMatrix::zeros(), VMatrix::zeros())
        };
        match simulate(&self.model, &self.params, &gains, &rollout_weights, &self.sim) {
            Ok(traj) => online_outer_cost(&traj, self.lambda),
            Err(_) => divergence_penalty(self.sim.horizon, 0.0),
        }
    }

    pub fn weights_for(&self, theta: &[f64]) -> crate::Result<LqgWeights> {
        Ok(LqgWeights::from_params(theta)?
            .with_noise(self.process_noise, self.measurement_noise))
    }
}

/// Outer cost of one candidate parameter vector.
pub fn evaluate_candidate(theta: &[f64], ctx: &TuningContext) -> f64 {
    match ctx.weights_for(theta) {
        Ok(weights) => ctx.evaluate_weights(&weights),
        Err(_) => divergence_penalty(ctx.sim.horizon, 0.0),
    }
}

impl ObjectiveFn for TuningContext {
    fn dim(&self) -> usize {
        PARAM_DIM
    }

    fn eval(&self, theta: &[f64]) -> f64 {
        evaluate_candidate(theta, self)
    }
}
