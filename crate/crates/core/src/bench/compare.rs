use serde::{Deserialize, Serialize};

use super::eval::{run_evaluation, EvalBudget};
use super::BenchError;
use crate::env::Network;
use crate::parl::{parl_train, ParlHyper, SamplingScheme};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingRow {
    pub scheme: String,
    pub mean_reward: f64,
    pub std_reward: f64,
    /// Training wall time per environment step.
    pub train_seconds_per_step: f64,
}

/// Trains with quantile and with random samples from the same seed and
/// evaluates both on the same demand traces.
pub fn compare_sampling(
    net: &Network,
    hyper: &ParlHyper,
    seed: u64,
    budget: &EvalBudget,
) -> Result<Vec<SamplingRow>, BenchError> {
    let mut rows = Vec::with_capacity(2);
    for scheme in [SamplingScheme::Quantile, SamplingScheme::Random] {
        let mut h = hyper.clone();
        h.sampling.scheme = scheme;
        let outcome = parl_train(net, &h, seed)?;
        let seconds: f64 = outcome.curve.iter().map(|c| c.seconds).sum();
        let steps = outcome.curve.last().map_or(1, |c| c.env_steps.max(1));
        let report = run_evaluation(net, &outcome.policy(net)?, budget);
        rows.push(SamplingRow {
            scheme: scheme.to_string(),
            mean_reward: report.mean,
            std_reward: report.std,
            train_seconds_per_step: seconds / steps as f64,
        });
    }
    Ok(rows)
}
