//! Deep policy iteration with a MIP actor over the fitted critic.

pub mod greedy;
pub mod policy;
pub mod rollout;
pub mod sampling;
pub mod train;

use thiserror::Error;

use crate::env::EnvError;
use crate::solver::SolverError;
use crate::valuenet::ValueNetError;

pub use greedy::{greedy_action, GreedyPolicy, SamplingConfig};
pub use policy::{FixedPolicy, Policy, RandomPolicy};
pub use rollout::{compute_returns, random_action, rollout, Trajectory, Transition};
pub use sampling::{quantile_levels, quantile_samples, random_samples, QuantileWeighting, SampleSet, SamplingScheme};
pub use train::{parl_train, CurveRow, ParlHyper, TrainOutcome};

#[derive(Debug, Error)]
pub enum ParlError {
    #[error("invalid sample set: {0}")]
    Samples(String),
    #[error("{0} has no usable inverse CDF for quantile sampling")]
    NonInvertible(String),
    #[error("invalid hyperparameters: {0}")]
    Hyper(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    ValueNet(#[from] ValueNetError),
}
