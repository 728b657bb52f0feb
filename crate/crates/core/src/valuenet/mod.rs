//! ReLU value network: evaluation, interval bounds and least-squares fitting.

pub mod bounds;
pub mod fit;
pub mod io;
pub mod net;

use thiserror::Error;

pub use bounds::{neuron_big_m, propagate_bounds, LayerBounds};
pub use fit::{fit, loss_and_grad, mse, FitDataset, FitHyper, FitOutcome};
pub use io::{critic_from_text, critic_to_text, net_from_text, net_to_text};
pub use net::{Activations, Critic, Layer, ReLUNet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValueNetError {
    #[error("input has dimension {got}, expected {want}")]
    Dimension { got: usize, want: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("input coordinate {0} is unbounded")]
    UnboundedInput(usize),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("non-finite parameter or target")]
    NonFinite,
    #[error("loss became non-finite in epoch {epoch}; lower the step size or check the targets")]
    NanLoss { epoch: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
