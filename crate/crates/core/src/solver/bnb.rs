use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::simplex::{LpForm, LpStatus, LpWorkspace};
use super::SolverError;
use crate::mip::{MilpModel, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Optimal,
    TimeLimited,
    Infeasible,
    /// Stopped by a limit before any integer-feasible point was found.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnbOptions {
    pub time_limit: Duration,
    pub node_limit: usize,
    pub int_tol: f64,
    pub record_trace: bool,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions { time_limit: Duration::from_secs(60), node_limit: usize::MAX, int_tol: 1e-6, record_trace: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    /// Relaxation value, `None` when the node LP is infeasible.
    pub lp_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipSolution {
    pub status: SolveStatus,
    pub x: Option<Vec<f64>>,
    /// Incumbent objective, `-inf` without one.
    pub objective: f64,
    pub bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub trace: Vec<TraceNode>,
}

struct Node {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    bound: f64,
    changes: Vec<(usize, f64, f64)>,
}

struct Key {
    bound: f64,
    id: usize,
}

impl PartialEq for Key {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        self.bound.total_cmp(&o.bound).then(o.id.cmp(&self.id))
    }
}

fn prune_tol(v: f64) -> f64 {
    1e-9 * v.abs().max(1.0)
}

/// Most fractional binary, else most fractional general integer.
fn branching_var(model: &MilpModel, x: &[f64], tol: f64) -> Option<usize> {
    let mut best: [Option<(usize, f64)>; 2] = [None, None];
    for (j, v) in model.vars.iter().enumerate() {
        let class = match v.kind {
            VarKind::Binary => 0,
            VarKind::Integer => 1,
            VarKind::Continuous => continue,
        };
        let f = x[j] - x[j].floor();
        let dist = f.min(1.0 - f);
        if dist <= tol {
            continue;
        }
        if best[class].is_none_or(|(_, d)| dist > d) {
            best[class] = Some((j, dist));
        }
    }
    best[0].or(best[1]).map(|(j, _)| j)
}

/// Best-first branch and bound with depth-first plunging.
///
/// `start` is an optional integer-feasible point used as the first
/// incumbent. The root relaxation is always solved, so a bound is reported
/// even under a tiny time limit.
pub fn solve_branch_and_bound(
    model: &MilpModel,
    opts: &BnbOptions,
    start: Option<&[f64]>,
) -> Result<MipSolution, SolverError> {
    let t0 = Instant::now();
    let n = model.vars.len();
    let mut ws = LpWorkspace::new(LpForm::new(model));
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    if let Some(x) = start {
        if x.len() == n && model.max_violation(x, true) <= 1e-6 {
            incumbent = Some((model.objective_value(x), x.to_vec()));
        }
    }
    let inc_value = |inc: &Option<(f64, Vec<f64>)>| inc.as_ref().map_or(f64::NEG_INFINITY, |i| i.0);
    let mut heap: BinaryHeap<Key> = BinaryHeap::new();
    let mut store: Vec<Option<Node>> = Vec::new();
    let mut trace = Vec::new();
    let mut lp_iterations = 0;
    let mut nodes = 0usize;
    let mut limited = false;
    let mut open_bound = f64::NEG_INFINITY;
    let mut plunge = Some(Node { id: 0, parent: None, depth: 0, bound: f64::INFINITY, changes: Vec::new() });
    let mut next_id = 1;
    let mut lb = vec![f64::NEG_INFINITY; n];
    let mut ub = vec![f64::INFINITY; n];
    loop {
        let node = match plunge.take() {
            Some(nd) => nd,
            None => match heap.pop() {
                Some(k) => store[k.id].take().expect("queued node is stored"),
                None => break,
            },
        };
        let inc = inc_value(&incumbent);
        if node.bound <= inc + prune_tol(inc) {
            continue;
        }
        if nodes > 0 && (t0.elapsed() >= opts.time_limit || nodes >= opts.node_limit) {
            limited = true;
            open_bound = open_bound.max(node.bound);
            break;
        }
        nodes += 1;
        lb.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
        ub.iter_mut().for_each(|v| *v = f64::INFINITY);
        for &(j, l, u) in &node.changes {
            lb[j] = lb[j].max(l);
            ub[j] = ub[j].min(u);
        }
        let lp = ws.solve(&lb, &ub)?;
        lp_iterations += lp.iterations;
        if opts.record_trace {
            trace.push(TraceNode {
                id: node.id,
                parent: node.parent,
                depth: node.depth,
                lp_value: (lp.status == LpStatus::Optimal).then_some(lp.objective),
            });
        }
        if lp.status == LpStatus::Infeasible {
            continue;
        }
        let value = lp.objective.min(node.bound);
        if value <= inc + prune_tol(inc) {
            continue;
        }
        let Some(j) = branching_var(model, &lp.x, opts.int_tol) else {
            let mut x = lp.x;
            for (k, v) in model.vars.iter().enumerate() {
                if v.kind != VarKind::Continuous {
                    x[k] = x[k].round();
                }
            }
            let obj = model.objective_value(&x);
            incumbent = Some((obj, x));
            continue;
        };
        let v = lp.x[j];
        let mut down = node.changes.clone();
        down.push((j, f64::NEG_INFINITY, v.floor()));
        let mut up = node.changes;
        up.push((j, v.ceil(), f64::INFINITY));
        let mk = |id, changes| Node { id, parent: Some(node.id), depth: node.depth + 1, bound: value, changes };
        let (first, second) = if v - v.floor() >= 0.5 {
            (mk(next_id, up), mk(next_id + 1, down))
        } else {
            (mk(next_id, down), mk(next_id + 1, up))
        };
        next_id += 2;
        heap.push(Key { bound: second.bound, id: second.id });
        if store.len() <= second.id {
            store.resize_with(second.id + 1, || None);
        }
        let sid = second.id;
        store[sid] = Some(second);
        plunge = Some(first);
    }
    let inc = inc_value(&incumbent);
    for k in heap.iter() {
        open_bound = open_bound.max(k.bound);
    }
    if let Some(nd) = plunge {
        open_bound = open_bound.max(nd.bound);
    }
    let (status, bound) = match (&incumbent, limited) {
        (Some(_), false) => (SolveStatus::Optimal, inc),
        (None, false) => (SolveStatus::Infeasible, f64::NEG_INFINITY),
        (Some(_), true) => (SolveStatus::TimeLimited, open_bound.max(inc)),
        (None, true) => (SolveStatus::Unknown, open_bound),
    };
    let gap = if status == SolveStatus::Optimal { 0.0 } else { bound - inc };
    Ok(MipSolution {
        status,
        objective: inc,
        x: incumbent.map(|i| i.1),
        bound,
        gap,
        nodes,
        lp_iterations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::Sense;

    fn knapsack() -> MilpModel {
        let mut m = MilpModel::new();
        let w = [5.0, 4.0, 6.0, 3.0];
        let v = [10.0, 40.0, 30.0, 50.0];
        let xs: Vec<usize> = (0..4).map(|j| m.add_var(format!("b{j}"), VarKind::Binary, 0.0, 1.0)).collect();
        m.add_con("cap", xs.iter().zip(w).map(|(&x, a)| (x, a)).collect(), Sense::Le, 10.0);
        for (&x, c) in xs.iter().zip(v) {
            m.add_obj(x, c);
        }
        m
    }

    #[test]
    fn knapsack_optimum() {
        let s = solve_branch_and_bound(&knapsack(), &BnbOptions::default(), None).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 90.0).abs() < 1e-9);
        assert_eq!(s.gap, 0.0);
    }

    #[test]
    fn integral_relaxation_needs_no_branching() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", VarKind::Integer, 0.0, 4.0);
        let y = m.add_var("y", VarKind::Integer, 0.0, 4.0);
        m.add_con("c", vec![(x, 1.0), (y, 1.0)], Sense::Le, 5.0);
        m.add_obj(x, 2.0);
        m.add_obj(y, 1.0);
        let s = solve_branch_and_bound(&m, &BnbOptions { record_trace: true, ..Default::default() }, None).unwrap();
        assert_eq!(s.nodes, 1);
        assert_eq!(s.trace.len(), 1);
        assert!((s.objective - 9.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_integer_program() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", VarKind::Integer, 0.0, 10.0);
        m.add_con("a", vec![(x, 2.0)], Sense::Ge, 3.0);
        m.add_con("b", vec![(x, 2.0)], Sense::Le, 3.5);
        let s = solve_branch_and_bound(&m, &BnbOptions::default(), None).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn children_never_exceed_their_parent() {
        let s = solve_branch_and_bound(&knapsack(), &BnbOptions { record_trace: true, ..Default::default() }, None).unwrap();
        for t in &s.trace {
            let (Some(p), Some(v)) = (t.parent, t.lp_value) else { continue };
            if let Some(pv) = s.trace.iter().find(|u| u.id == p).and_then(|u| u.lp_value) {
                assert!(v <= pv + 1e-9);
            }
        }
    }

    #[test]
    fn search_is_deterministic() {
        let o = BnbOptions { record_trace: true, ..Default::default() };
        let a = solve_branch_and_bound(&knapsack(), &o, None).unwrap();
        let b = solve_branch_and_bound(&knapsack(), &o, None).unwrap();
        assert_eq!(a, b);
    }
}
