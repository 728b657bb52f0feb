use rand_chacha::ChaCha8Rng;

use super::policy::Policy;
use super::sampling::{quantile_samples, random_samples, QuantileWeighting, SampleSet, SamplingScheme};
use super::ParlError;
use crate::env::{Action, Network, PipelineState};
use crate::solver::{solve_step, SolveResult, StepMethod};
use crate::valuenet::Critic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    pub scheme: SamplingScheme,
    pub eta: usize,
    pub weighting: QuantileWeighting,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { scheme: SamplingScheme::Quantile, eta: 3, weighting: QuantileWeighting::LevelDensity }
    }
}

/// Argmax of the weighted one-step lookahead against `critic`. Weights are
/// normalized first, so any positive rescaling gives the same action.
pub fn greedy_action(
    net: &Network,
    state: &PipelineState,
    critic: &Critic,
    samples: &SampleSet,
    gamma: f64,
    method: &StepMethod,
) -> Result<SolveResult, ParlError> {
    let s = samples.clone().normalized()?;
    Ok(solve_step(net, state, &s.realizations, &s.weights, critic, gamma, method)?)
}

/// The greedy policy of one critic snapshot.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    pub critic: Critic,
    pub sampling: SamplingConfig,
    pub gamma: f64,
    pub method: StepMethod,
    fixed: Option<SampleSet>,
}

impl GreedyPolicy {
    pub fn new(net: &Network, critic: Critic, sampling: SamplingConfig, gamma: f64, method: StepMethod) -> Result<Self, ParlError> {
        let fixed = match sampling.scheme {
            SamplingScheme::Quantile => Some(quantile_samples(net, sampling.eta, sampling.weighting)?),
            SamplingScheme::Random => None,
        };
        Ok(GreedyPolicy { critic, sampling, gamma, method, fixed })
    }

    pub fn samples(&self, net: &Network, rng: &mut ChaCha8Rng) -> Result<SampleSet, ParlError> {
        match &self.fixed {
            Some(s) => Ok(s.clone()),
            None => random_samples(net, self.sampling.eta, rng),
        }
    }

    pub fn solve(&self, net: &Network, state: &PipelineState, rng: &mut ChaCha8Rng) -> Result<SolveResult, ParlError> {
        let s = self.samples(net, rng)?;
        greedy_action(net, state, &self.critic, &s, self.gamma, &self.method)
    }
}

impl Policy for GreedyPolicy {
    fn name(&self) -> String {
        format!("parl-{}", self.sampling.scheme)
    }

    fn act(&self, net: &Network, state: &PipelineState, rng: &mut ChaCha8Rng) -> Result<Action, ParlError> {
        Ok(self.solve(net, state, rng)?.action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::presets::{preset, Preset, Scale};
    use crate::env::{reset, Network};
    use crate::valuenet::ReLUNet;
    use rand::SeedableRng;

    #[test]
    fn flat_problem_returns_zero() {
        let mut cfg = preset(Preset::Smoke, Scale::Desk).config().clone();
        for n in &mut cfg.nodes {
            n.price = 0.0;
            n.holding_cost = 0.0;
            n.spillage_cost = 0.0;
        }
        cfg.links[0].fixed_cost = 0.0;
        let net = Network::new(cfg).unwrap();
        let critic = Critic::zero(net.feature_scale(), &[4]);
        let s = quantile_samples(&net, 3, QuantileWeighting::LevelDensity).unwrap();
        let mut state = reset(&net, 1);
        state.pipelines[0][0] = 8;
        for method in [StepMethod::enumeration(), StepMethod::default()] {
            let r = greedy_action(&net, &state, &critic, &s, 0.75, &method).unwrap();
            assert_eq!(r.action, Action(vec![0]));
        }
    }

    #[test]
    fn weight_scaling_does_not_change_the_action() {
        let net = preset(Preset::Smoke, Scale::Desk);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let critic = Critic::new(ReLUNet::random(net.state_dim(), &[8, 8], &mut rng), net.feature_scale()).unwrap();
        let s = random_samples(&net, 4, &mut rng).unwrap();
        let state = reset(&net, 9);
        let mut scaled = s.clone();
        scaled.weights.iter_mut().enumerate().for_each(|(i, w)| *w *= 7.5 * (i + 1) as f64);
        let mut base = s.clone();
        base.weights.iter_mut().enumerate().for_each(|(i, w)| *w *= (i + 1) as f64);
        let a = greedy_action(&net, &state, &critic, &base, 0.75, &StepMethod::enumeration()).unwrap();
        let b = greedy_action(&net, &state, &critic, &scaled, 0.75, &StepMethod::enumeration()).unwrap();
        assert_eq!(a.action, b.action);
    }
}
