use log::warn;
use serde::Serialize;

use super::bnb::{solve_branch_and_bound, BnbOptions, SolveStatus};
use super::enumerate::{evaluate_action, solve_enumeration, DEFAULT_ENUMERATION_CAP};
use super::external::{solve_external, ExternalSolver};
use super::SolverError;
use crate::env::{available_supply, Action, Network, PipelineState, Realization};
use crate::mip::{build_step_problem, StepOptions};
use crate::valuenet::Critic;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub action: Action,
    /// Sample-average objective of `action`, recomputed with the simulator.
    pub objective: f64,
    pub gap: f64,
    pub status: SolveStatus,
    /// Branch-and-bound nodes, or actions visited by enumeration.
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepMethod {
    Enumeration { cap: u128 },
    BranchAndBound { options: BnbOptions, model: StepOptions },
    External { solver: ExternalSolver, model: StepOptions },
    /// Enumeration when the action space fits under `cap`, else branch and bound.
    Auto { cap: u128, options: BnbOptions },
}

impl Default for StepMethod {
    fn default() -> Self {
        StepMethod::BranchAndBound { options: BnbOptions::default(), model: StepOptions::default() }
    }
}

impl StepMethod {
    pub fn enumeration() -> Self {
        StepMethod::Enumeration { cap: DEFAULT_ENUMERATION_CAP }
    }
}

/// The smallest order on every link, if on-hand supply allows it.
pub fn minimal_action(net: &Network, state: &PipelineState) -> Option<Action> {
    let a = Action((0..net.num_links()).map(|k| net.link(k).min_order).collect());
    let ok = (0..net.num_nodes()).all(|l| match available_supply(net, state, l) {
        Some(s) => net.outgoing(l).iter().map(|&k| a.0[k]).sum::<i64>() <= s,
        None => true,
    });
    ok.then_some(a)
}

/// Maximizes the sample-average objective of one period.
pub fn solve_step(
    net: &Network,
    state: &PipelineState,
    samples: &[Realization],
    weights: &[f64],
    critic: &Critic,
    gamma: f64,
    method: &StepMethod,
) -> Result<SolveResult, SolverError> {
    let (options, model_opts) = match method {
        StepMethod::Enumeration { cap } => {
            return solve_enumeration(net, state, samples, weights, critic, gamma, *cap);
        }
        StepMethod::Auto { cap, options } => {
            if net.action_space_size() <= *cap {
                return solve_enumeration(net, state, samples, weights, critic, gamma, *cap);
            }
            (*options, StepOptions::default())
        }
        StepMethod::BranchAndBound { options, model } => (*options, *model),
        StepMethod::External { solver, model } => {
            let prob = build_step_problem(net, state, samples, weights, critic, gamma, model)?;
            let x = solve_external(&prob.model, solver)?;
            let action = prob.action(&x);
            let objective = evaluate_action(net, state, samples, weights, critic, gamma, &action)?;
            return Ok(SolveResult { action, objective, gap: 0.0, status: SolveStatus::Optimal, nodes: 0 });
        }
    };
    let prob = build_step_problem(net, state, samples, weights, critic, gamma, &model_opts)?;
    let start = match minimal_action(net, state) {
        Some(a) if !model_opts.relax_integrality => Some(prob.lift(net, state, samples, critic, &a)?),
        _ => None,
    };
    let sol = solve_branch_and_bound(&prob.model, &options, start.as_deref())?;
    let Some(x) = sol.x else {
        warn!("no integer-feasible action found ({:?}); falling back to the minimal order", sol.status);
        let action = minimal_action(net, state).unwrap_or_else(|| Action::zeros(net));
        return Ok(SolveResult {
            action,
            objective: f64::NEG_INFINITY,
            gap: sol.gap,
            status: sol.status,
            nodes: sol.nodes,
        });
    };
    let action = prob.action(&x);
    let objective = evaluate_action(net, state, samples, weights, critic, gamma, &action)?;
    if (objective - sol.objective).abs() > 1e-6 * (1.0 + objective.abs()) {
        warn!("solver objective {} differs from the simulated value {objective}", sol.objective);
    }
    Ok(SolveResult { action, objective, gap: sol.gap, status: sol.status, nodes: sol.nodes })
}
