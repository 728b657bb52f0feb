//! Exact per-step solvers: dual simplex, branch and bound, enumeration.

pub mod bnb;
pub mod enumerate;
pub mod external;
pub mod simplex;
pub mod step;

use thiserror::Error;

use crate::env::EnvError;
use crate::mip::MipError;
use crate::valuenet::ValueNetError;

pub use bnb::{solve_branch_and_bound, BnbOptions, MipSolution, SolveStatus, TraceNode};
pub use enumerate::{action_count, evaluate_action, for_each_action, solve_enumeration, DEFAULT_ENUMERATION_CAP};
pub use external::{parse_solution, solve_external, ExternalSolver};
pub use simplex::{solve_lp, LpForm, LpSolution, LpStatus, LpWorkspace};
pub use step::{minimal_action, solve_step, SolveResult, StepMethod};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("simplex made no progress after {iterations} pivots")]
    Stall { iterations: usize },
    #[error("the relaxation is unbounded; every variable needs finite bounds")]
    Unbounded,
    #[error("action space has {size} points, above the enumeration cap {cap}; use branch and bound")]
    EnumerationCap { size: u128, cap: u128 },
    #[error("external solver: {0}")]
    External(String),
    #[error(transparent)]
    Mip(#[from] MipError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    ValueNet(#[from] ValueNetError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
