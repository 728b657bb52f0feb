use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Env, Network};
use crate::parl::Policy;

/// Runs × episodes × steps, all derived from one base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalBudget {
    pub runs: usize,
    pub episodes: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { runs: 10, episodes: 20, steps: 256, seed: 0 }
    }
}

impl EvalBudget {
    pub fn tiny() -> Self {
        EvalBudget { runs: 2, episodes: 2, steps: 32, seed: 0 }
    }

    /// Simulator and policy seeds of run `r`. Simulator seeds never depend
    /// on the policy, so evaluations sharing a budget see the same demands.
    pub fn run_seeds(&self, r: usize) -> (u64, u64) {
        let mut g = ChaCha8Rng::seed_from_u64(self.seed);
        g.set_stream(r as u64 + 1);
        (g.random(), g.random())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BreakdownTotals {
    pub revenue: f64,
    pub ordering_cost: f64,
    pub holding_cost: f64,
    pub backorder_cost: f64,
    pub reward: f64,
    pub steps: usize,
}

impl BreakdownTotals {
    fn add(&mut self, o: &BreakdownTotals) {
        self.revenue += o.revenue;
        self.ordering_cost += o.ordering_cost;
        self.holding_cost += o.holding_cost;
        self.backorder_cost += o.backorder_cost;
        self.reward += o.reward;
        self.steps += o.steps;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub env_seed: u64,
    pub mean_reward: f64,
    /// Sum of all realized demand, a fingerprint of the demand trace.
    pub demand_total: i64,
    pub totals: BreakdownTotals,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub policy: String,
    pub runs: Vec<RunRecord>,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    /// Summed over successful runs.
    pub totals: BreakdownTotals,
}

impl EvalReport {
    pub fn successful(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(|r| r.error.is_none())
    }

    pub fn failed(&self) -> usize {
        self.runs.len() - self.successful().count()
    }

    fn from_runs(policy: String, runs: Vec<RunRecord>) -> Self {
        let ok: Vec<f64> = runs.iter().filter(|r| r.error.is_none()).map(|r| r.mean_reward).collect();
        let (mean, median, std) = if ok.is_empty() { (f64::NAN, f64::NAN, f64::NAN) } else { summary(&ok) };
        let mut totals = BreakdownTotals::default();
        for r in runs.iter().filter(|r| r.error.is_none()) {
            totals.add(&r.totals);
        }
        EvalReport { policy, runs, mean, median, std, totals }
    }
}

/// Mean, median and population standard deviation.
pub fn summary(values: &[f64]) -> (f64, f64, f64) {
    crate::parl::train::summary(values)
}

fn run_once(net: &Network, policy: &dyn Policy, budget: &EvalBudget, r: usize) -> RunRecord {
    let (env_seed, policy_seed) = budget.run_seeds(r);
    let mut env = Env::new(net.clone(), env_seed);
    let mut prng = ChaCha8Rng::seed_from_u64(policy_seed);
    let mut totals = BreakdownTotals::default();
    let mut demand_total = 0;
    for ep in 0..budget.episodes {
        if ep > 0 {
            env.reset();
        }
        for _ in 0..budget.steps {
            let out = policy.act(net, &env.state, &mut prng).map_err(|e| e.to_string()).and_then(|a| {
                env.step(&a).map_err(|e| e.to_string())
            });
            match out {
                Ok((_, real, rb)) => {
                    demand_total += real.demand.iter().sum::<i64>();
                    totals.revenue += rb.revenue();
                    totals.ordering_cost += rb.ordering_cost();
                    totals.holding_cost += rb.holding_cost();
                    totals.backorder_cost += rb.backorder_cost();
                    totals.reward += rb.total;
                    totals.steps += 1;
                }
                Err(error) => {
                    warn!("{} run {r} failed at episode {ep}: {error}; excluded from the report", policy.name());
                    return RunRecord { run: r, env_seed, mean_reward: f64::NAN, demand_total, totals, error: Some(error) };
                }
            }
        }
    }
    let mean_reward = totals.reward / totals.steps.max(1) as f64;
    RunRecord { run: r, env_seed, mean_reward, demand_total, totals, error: None }
}

/// Mean per-step reward of each run, in parallel over runs. A run whose
/// policy fails is kept in the record list but excluded from statistics.
pub fn run_evaluation(net: &Network, policy: &dyn Policy, budget: &EvalBudget) -> EvalReport {
    let runs: Vec<RunRecord> = (0..budget.runs).into_par_iter().map(|r| run_once(net, policy, budget, r)).collect();
    EvalReport::from_runs(policy.name(), runs)
}
