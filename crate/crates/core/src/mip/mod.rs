//! Per-step mixed-integer program: ReLU encoding, inventory rows, LP files.

pub mod encode;
pub mod lp;
pub mod model;
pub mod step;

use thiserror::Error;

use crate::env::EnvError;
use crate::valuenet::ValueNetError;

pub use encode::{encode_network, EncodedNet, NetInput};
pub use lp::{export_lp, fmt_num, parse_lp};
pub use model::{valid_name, Constraint, MilpModel, ModelStats, Sense, Var, VarKind};
pub use step::{build_step_problem, SampleVars, StepOptions, StepProblem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MipError {
    #[error("invalid model: {0}")]
    Model(String),
    #[error("name `{0}` is declared twice")]
    NameCollision(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("network input `{0}` has an unbounded range")]
    UnboundedInput(String),
    #[error(transparent)]
    ValueNet(#[from] ValueNetError),
    #[error(transparent)]
    Env(#[from] EnvError),
}
