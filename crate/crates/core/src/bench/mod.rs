//! Evaluation harness, experiment specs and report files.

pub mod compare;
pub mod eval;
pub mod experiment;
pub mod report;

use thiserror::Error;

pub use compare::{compare_sampling, SamplingRow};
pub use eval::{run_evaluation, summary, BreakdownTotals, EvalBudget, EvalReport, RunRecord};
pub use experiment::{load_network, run_experiment, run_experiment_spec, ExperimentSpec, Method, ParlSection};
pub use report::{read_csv, write_csv, EvalRow, SummaryRow};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown method `{0}`; expected parl, bs, da or fixed")]
    UnknownMethod(String),
    #[error("malformed experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Config(#[from] crate::env::ConfigError),
    #[error(transparent)]
    Parl(#[from] crate::parl::ParlError),
    #[error(transparent)]
    Heuristic(#[from] crate::heuristics::HeuristicError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
