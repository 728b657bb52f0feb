use log::warn;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::policy::{Policy, RandomPolicy};
use super::ParlError;
use crate::env::{Action, Env, Network, PipelineState, Realization, RewardBreakdown};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: PipelineState,
    pub requested: Action,
    /// The shipment actually made after proportional fulfillment.
    pub action: Action,
    pub realization: Realization,
    pub breakdown: RewardBreakdown,
    pub next: PipelineState,
    pub explored: bool,
}

impl Transition {
    pub fn reward(&self) -> f64 {
        self.breakdown.total
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub steps: Vec<Transition>,
}

impl Trajectory {
    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|t| t.reward()).collect()
    }

    pub fn mean_reward(&self) -> f64 {
        self.steps.iter().map(|t| t.reward()).sum::<f64>() / self.steps.len().max(1) as f64
    }

    pub fn explored_steps(&self) -> usize {
        self.steps.iter().filter(|t| t.explored).count()
    }
}

pub fn random_action(net: &Network, state: &PipelineState, rng: &mut ChaCha8Rng) -> Action {
    RandomPolicy.act(net, state, rng).expect("random policy is infallible")
}

/// Plays `steps` periods from the current state of `env`. Each period is an
/// exploration step with probability `epsilon`.
pub fn rollout(
    env: &mut Env,
    policy: &dyn Policy,
    steps: usize,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory, ParlError> {
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let state = env.state.clone();
        let explored = epsilon > 0.0 && rng.random_bool(epsilon.min(1.0));
        let requested = if explored { random_action(&env.net, &state, rng) } else { policy.act(&env.net, &state, rng)? };
        let (action, realization, breakdown) = env.step(&requested)?;
        if !explored && action != requested {
            warn!("{} requested {:?}, shipped {:?} after fulfillment", policy.name(), requested.0, action.0);
        }
        out.push(Transition { state, requested, action, realization, breakdown, next: env.state.clone(), explored });
    }
    Ok(Trajectory { steps: out })
}

/// Discounted reward-to-go `R_t = r_t + γ R_{t+1}` with `R_{T+1} = 0`.
pub fn compute_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (t, r) in rewards.iter().enumerate().rev() {
        acc = r + gamma * acc;
        out[t] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::presets::{preset, Preset, Scale};
    use crate::parl::policy::FixedPolicy;
    use rand::SeedableRng;

    #[test]
    fn hand_recursion() {
        assert_eq!(compute_returns(&[1.0, 1.0, 1.0], 0.5), vec![1.75, 1.5, 1.0]);
        assert_eq!(compute_returns(&[3.0, -2.0, 5.0], 0.0), vec![3.0, -2.0, 5.0]);
    }

    #[test]
    fn full_exploration_flags_every_step() {
        let net = preset(Preset::Smoke, Scale::Desk);
        let mut env = Env::new(net.clone(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = rollout(&mut env, &FixedPolicy(Action::zeros(&net)), 20, 1.0, &mut rng).unwrap();
        assert_eq!(t.steps.len(), 20);
        assert_eq!(t.explored_steps(), 20);
        for w in t.steps.windows(2) {
            assert_eq!(w[0].next, w[1].state);
        }
    }

    #[test]
    fn deterministic_given_seeds() {
        let net = preset(Preset::Smoke, Scale::Desk);
        let run = || {
            let mut env = Env::new(net.clone(), 7);
            rollout(&mut env, &FixedPolicy(Action(vec![3])), 30, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
        };
        assert_eq!(run(), run());
    }
}
