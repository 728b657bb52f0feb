use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ParlError;
use crate::env::{Action, Network, PipelineState};

/// A stationary decision rule. `rng` is the policy's own stream and never
/// the simulator's, so demand traces do not depend on the policy.
pub trait Policy: Sync {
    fn name(&self) -> String;
    fn act(&self, net: &Network, state: &PipelineState, rng: &mut ChaCha8Rng) -> Result<Action, ParlError>;
}

/// Independent uniform order sizes on every link.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn name(&self) -> String {
        "random".into()
    }

    fn act(&self, net: &Network, _state: &PipelineState, rng: &mut ChaCha8Rng) -> Result<Action, ParlError> {
        Ok(Action((0..net.num_links()).map(|k| rng.random_range(net.link(k).min_order..=net.link(k).max_order)).collect()))
    }
}

/// The same action in every state.
#[derive(Debug, Clone)]
pub struct FixedPolicy(pub Action);

impl Policy for FixedPolicy {
    fn name(&self) -> String {
        "fixed".into()
    }

    fn act(&self, _net: &Network, _state: &PipelineState, _rng: &mut ChaCha8Rng) -> Result<Action, ParlError> {
        Ok(self.0.clone())
    }
}
