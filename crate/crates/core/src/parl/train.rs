use std::time::Instant;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::greedy::{GreedyPolicy, SamplingConfig};
use super::policy::{Policy, RandomPolicy};
use super::rollout::{compute_returns, rollout, Trajectory};
use super::ParlError;
use crate::env::{Env, Network};
use crate::solver::{BnbOptions, StepMethod};
use crate::valuenet::{fit, Critic, FitDataset, FitHyper, ReLUNet};

#[derive(Debug, Clone, PartialEq)]
pub struct ParlHyper {
    pub gamma: f64,
    pub sampling: SamplingConfig,
    pub epsilon: f64,
    /// Periods per rollout.
    pub steps: usize,
    /// Rollouts per iteration.
    pub paths: usize,
    pub iterations: usize,
    pub hidden: Vec<usize>,
    pub fit: FitHyper,
    pub method: StepMethod,
    /// Start each fit from the previous critic instead of a fresh network.
    pub warm_start: bool,
    pub threads: usize,
}

impl Default for ParlHyper {
    fn default() -> Self {
        ParlHyper {
            gamma: 0.75,
            sampling: SamplingConfig::default(),
            epsilon: 0.1,
            steps: 256,
            paths: 8,
            iterations: 10,
            hidden: vec![16, 16],
            fit: FitHyper::default(),
            method: StepMethod::Auto { cap: 20_000, options: BnbOptions::default() },
            warm_start: false,
            threads: 8,
        }
    }
}

impl ParlHyper {
    pub fn validate(&self) -> Result<(), ParlError> {
        let bad = |m: &str| Err(ParlError::Hyper(m.into()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon must lie in [0, 1]");
        }
        if self.sampling.eta == 0 || self.steps == 0 || self.paths == 0 || self.iterations == 0 {
            return bad("eta, steps, paths and iterations must be positive");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("the critic needs at least one nonempty hidden layer");
        }
        Ok(())
    }
}

/// One learning-curve point: statistics of the per-rollout mean reward.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CurveRow {
    pub iteration: usize,
    pub env_steps: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Critic fitted at the end of each iteration.
    pub critics: Vec<Critic>,
    pub curve: Vec<CurveRow>,
    pub hyper: ParlHyper,
}

impl TrainOutcome {
    pub fn policy(&self, net: &Network) -> Result<GreedyPolicy, ParlError> {
        let critic = self.critics.last().expect("at least one iteration").clone();
        GreedyPolicy::new(net, critic, self.hyper.sampling, self.hyper.gamma, self.hyper.method.clone())
    }
}

pub(crate) fn summary(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let median = if s.is_empty() {
        0.0
    } else if s.len() % 2 == 1 {
        s[s.len() / 2]
    } else {
        0.5 * (s[s.len() / 2 - 1] + s[s.len() / 2])
    };
    (mean, median, std)
}

/// Runs `paths` rollouts in parallel; seeds are drawn up front so the
/// result does not depend on scheduling.
pub(crate) fn parallel_rollouts(
    net: &Network,
    policy: &dyn Policy,
    hyper: &ParlHyper,
    master: &mut ChaCha8Rng,
    pool: &rayon::ThreadPool,
) -> Result<Vec<Trajectory>, ParlError> {
    let seeds: Vec<(u64, u64)> = (0..hyper.paths).map(|_| (master.random(), master.random())).collect();
    pool.install(|| {
        seeds
            .par_iter()
            .map(|&(env_seed, policy_seed)| {
                let mut env = Env::new(net.clone(), env_seed);
                let mut rng = ChaCha8Rng::seed_from_u64(policy_seed);
                rollout(&mut env, policy, hyper.steps, hyper.epsilon, &mut rng)
            })
            .collect()
    })
}

/// Policy iteration: roll out the current policy, regress discounted
/// returns on visited states, act greedily against the new critic.
/// The first iteration rolls out uniformly random orders.
pub fn parl_train(net: &Network, hyper: &ParlHyper, seed: u64) -> Result<TrainOutcome, ParlError> {
    hyper.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(hyper.threads.max(1))
        .build()
        .map_err(|e| ParlError::Hyper(e.to_string()))?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let scale = net.feature_scale();
    let dim = net.state_dim();
    let mut critics: Vec<Critic> = Vec::with_capacity(hyper.iterations);
    let mut curve = Vec::with_capacity(hyper.iterations);
    let mut env_steps = 0;
    for it in 1..=hyper.iterations {
        let t0 = Instant::now();
        let greedy;
        let policy: &dyn Policy = match critics.last() {
            None => &RandomPolicy,
            Some(c) => {
                greedy = GreedyPolicy::new(net, c.clone(), hyper.sampling, hyper.gamma, hyper.method.clone())?;
                &greedy
            }
        };
        let trajs = parallel_rollouts(net, policy, hyper, &mut master, &pool)?;
        env_steps += hyper.paths * hyper.steps;
        let mut data = FitDataset::default();
        let mut path_means = Vec::with_capacity(trajs.len());
        for t in &trajs {
            let ret = compute_returns(&t.rewards(), hyper.gamma);
            for (tr, r) in t.steps.iter().zip(ret) {
                data.push(tr.state.to_vector(net).iter().zip(&scale).map(|(v, s)| v / s).collect(), r);
            }
            path_means.push(t.mean_reward());
        }
        let mut fit_rng = ChaCha8Rng::seed_from_u64(master.random());
        let init = match (hyper.warm_start, critics.last()) {
            (true, Some(c)) => c.net.clone(),
            _ => ReLUNet::random(dim, &hyper.hidden, &mut fit_rng),
        };
        let outcome = fit(&init, &data, &hyper.fit, &mut fit_rng)?;
        critics.push(Critic::new(outcome.net, scale.clone())?);
        let (mean, median, std) = summary(&path_means);
        let seconds = t0.elapsed().as_secs_f64();
        info!(
            "iteration {it}: mean reward {mean:.3} (median {median:.3}, std {std:.3}), fit mse {:.3}, {seconds:.1}s",
            outcome.losses.last().copied().unwrap_or(f64::NAN)
        );
        curve.push(CurveRow { iteration: it, env_steps, mean, median, std, seconds });
    }
    Ok(TrainOutcome { critics, curve, hyper: hyper.clone() })
}
