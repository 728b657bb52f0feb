use super::bnb::SolveStatus;
use super::{SolveResult, SolverError};
use crate::env::{available_supply, step, Action, Network, PipelineState, Realization};
use crate::valuenet::Critic;

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Sample-average value `Σ_i w_i [R(s, a, d_i) + γ V(s'_i)]` of one action.
pub fn evaluate_action(
    net: &Network,
    state: &PipelineState,
    samples: &[Realization],
    weights: &[f64],
    critic: &Critic,
    gamma: f64,
    action: &Action,
) -> Result<f64, SolverError> {
    let mut total = 0.0;
    for (real, w) in samples.iter().zip(weights) {
        let (next, rb) = step(net, state, action, real)?;
        total += w * (rb.total + gamma * critic.value(&next.to_vector(net))?);
    }
    Ok(total)
}

/// Product of the per-link ranges `[min_order, max_order]`.
pub fn action_count(net: &Network) -> u128 {
    net.action_space_size()
}

/// Visits every supply-feasible action in lexicographic order.
pub fn for_each_action<F>(net: &Network, state: &PipelineState, mut f: F) -> Result<(), SolverError>
where
    F: FnMut(&Action) -> Result<(), SolverError>,
{
    let k = net.num_links();
    let lo: Vec<i64> = (0..k).map(|j| net.link(j).min_order).collect();
    let hi: Vec<i64> = (0..k).map(|j| net.link(j).max_order).collect();
    let supply: Vec<Option<i64>> = (0..net.num_nodes()).map(|l| available_supply(net, state, l)).collect();
    let feasible = |a: &Action| {
        (0..net.num_nodes()).all(|l| match supply[l] {
            Some(s) => net.outgoing(l).iter().map(|&j| a.0[j]).sum::<i64>() <= s,
            None => true,
        })
    };
    let mut a = Action(lo.clone());
    loop {
        if feasible(&a) {
            f(&a)?;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if a.0[i] < hi[i] {
                a.0[i] += 1;
                break;
            }
            a.0[i] = lo[i];
        }
    }
}

/// Exhaustive argmax over feasible integer actions. Ties keep the
/// lexicographically smallest action.
pub fn solve_enumeration(
    net: &Network,
    state: &PipelineState,
    samples: &[Realization],
    weights: &[f64],
    critic: &Critic,
    gamma: f64,
    cap: u128,
) -> Result<SolveResult, SolverError> {
    let size = action_count(net);
    if size > cap {
        return Err(SolverError::EnumerationCap { size, cap });
    }
    let mut best: Option<(f64, Action)> = None;
    let mut visited = 0usize;
    for_each_action(net, state, |a| {
        visited += 1;
        let v = evaluate_action(net, state, samples, weights, critic, gamma, a)?;
        if best.as_ref().is_none_or(|(b, _)| v > b + 1e-9) {
            best = Some((v, a.clone()));
        }
        Ok(())
    })?;
    match best {
        Some((objective, action)) => Ok(SolveResult { action, objective, gap: 0.0, status: SolveStatus::Optimal, nodes: visited }),
        None => Ok(SolveResult {
            action: Action::zeros(net),
            objective: f64::NEG_INFINITY,
            gap: f64::INFINITY,
            status: SolveStatus::Infeasible,
            nodes: 0,
        }),
    }
}
