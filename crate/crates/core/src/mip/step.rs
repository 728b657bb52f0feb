use super::encode::{encode_network, EncodedNet, NetInput};
use super::model::{MilpModel, Sense, VarKind};
use super::MipError;
use crate::env::config::UNBOUNDED;
use crate::env::{available_supply, step, Action, EnvError, Network, PipelineState, Realization, StateSlot};
use crate::valuenet::{propagate_bounds, Critic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOptions {
    /// Drop every integrality marker (diagnostics only).
    pub relax_integrality: bool,
    /// Add the binaries that force sales and spillage to follow the
    /// simulator exactly, whatever the signs of the cost coefficients.
    pub exact_recourse: bool,
    /// Allow discarding units in transit at the spillage cost.
    pub salvage_all_slots: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { relax_integrality: false, exact_recourse: true, salvage_all_slots: false }
    }
}

/// Variables of one sample copy, indexed by node.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVars {
    pub inter: Vec<Option<usize>>,
    pub sales: Vec<Option<usize>>,
    pub sales_switch: Vec<Option<usize>>,
    pub spill: Vec<Option<usize>>,
    pub spill_switch: Vec<Option<usize>>,
    pub backlog: Vec<Option<usize>>,
    /// Next-period pipeline, slot 0 being the kept on-hand stock.
    pub next: Vec<Vec<usize>>,
    pub salvage: Vec<Vec<Option<usize>>>,
    pub critic: EncodedNet,
}

#[derive(Debug, Clone)]
pub struct StepProblem {
    pub model: MilpModel,
    pub ship: Vec<usize>,
    pub order: Vec<usize>,
    pub samples: Vec<SampleVars>,
}

fn check_inputs(
    net: &Network,
    state: &PipelineState,
    samples: &[Realization],
    weights: &[f64],
    critic: &Critic,
) -> Result<(), MipError> {
    if samples.is_empty() {
        return Err(MipError::Dimension("at least one sample is required".into()));
    }
    if samples.len() != weights.len() {
        return Err(MipError::Dimension(format!("{} samples but {} weights", samples.len(), weights.len())));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(MipError::Model("sample weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(MipError::Model(format!("sample weights sum to {total}, expected 1")));
    }
    let n = net.num_nodes();
    if samples.iter().any(|s| s.demand.len() != n || s.production.len() != n) {
        return Err(MipError::Dimension(format!("samples must cover {n} nodes")));
    }
    state.check(net).map_err(EnvError::State)?;
    if critic.net.input_dim() != net.state_dim() {
        return Err(MipError::Dimension(format!(
            "critic takes {} inputs, the network state has {}",
            critic.net.input_dim(),
            net.state_dim()
        )));
    }
    Ok(())
}

/// The sample-average decision problem of one period:
/// maximize `Σ_i w_i [R(s, x, d_i) + γ V(s'_i)]` over integer shipments `x`
/// that respect on-hand supply.
pub fn build_step_problem(
    net: &Network,
    state: &PipelineState,
    samples: &[Realization],
    weights: &[f64],
    critic: &Critic,
    gamma: f64,
    opts: &StepOptions,
) -> Result<StepProblem, MipError> {
    check_inputs(net, state, samples, weights, critic)?;
    let (int_kind, bin_kind) = if opts.relax_integrality {
        (VarKind::Continuous, VarKind::Continuous)
    } else {
        (VarKind::Integer, VarKind::Binary)
    };
    let mut m = MilpModel::new();
    m.comments.push("per-period sample-average inventory problem".into());
    m.comments.push("critic inputs are divided by the feature scale inside the first-layer coefficients".into());
    let n = net.num_nodes();
    let mut ship = Vec::with_capacity(net.num_links());
    let mut order = Vec::with_capacity(net.num_links());
    for k in 0..net.num_links() {
        let l = net.link(k);
        let x = m.add_var(format!("x{k}"), int_kind, l.min_order as f64, l.max_order as f64);
        let g = m.add_var(format!("g{k}"), bin_kind, 0.0, 1.0);
        m.add_con(format!("order_lo{k}"), vec![(g, 1.0), (x, -1.0)], Sense::Le, 0.0);
        m.add_con(format!("order_hi{k}"), vec![(x, 1.0), (g, -(l.max_order as f64))], Sense::Le, 0.0);
        m.add_obj(g, -l.fixed_cost);
        m.add_obj(x, -l.variable_cost);
        ship.push(x);
        order.push(g);
    }
    let avail: Vec<Option<i64>> = (0..n).map(|l| available_supply(net, state, l)).collect();
    for (l, a) in avail.iter().enumerate() {
        if let Some(a) = *a {
            if !net.outgoing(l).is_empty() {
                let terms = net.outgoing(l).iter().map(|&k| (ship[k], 1.0)).collect();
                m.add_con(format!("supply{l}"), terms, Sense::Le, a as f64);
            }
        }
    }
    let sum_bounds = |links: &[usize]| -> (f64, f64) {
        links.iter().fold((0.0, 0.0), |(lo, hi), &k| {
            (lo + net.link(k).min_order as f64, hi + net.link(k).max_order as f64)
        })
    };
    let slots = net.state_slots();
    let mut out = Vec::with_capacity(samples.len());
    for (i, (real, &w)) in samples.iter().zip(weights).enumerate() {
        let p = format!("s{i}_");
        let mut sv = SampleVars {
            inter: vec![None; n],
            sales: vec![None; n],
            sales_switch: vec![None; n],
            spill: vec![None; n],
            spill_switch: vec![None; n],
            backlog: vec![None; n],
            next: vec![Vec::new(); n],
            salvage: vec![Vec::new(); n],
            critic: EncodedNet { z: vec![], y: vec![], output_terms: vec![], output_constant: 0.0 },
        };
        for l in 0..n {
            let len = net.pipe_len(l);
            if len == 0 {
                continue;
            }
            let spec = net.node(l);
            let pipe = &state.pipelines[l];
            let slot = |j: usize| pipe.get(j).copied().unwrap_or(0) as f64;
            let arrive: Vec<Vec<usize>> = (0..len)
                .map(|j| net.incoming(l).iter().copied().filter(|&k| net.link(k).lead_time == j).collect())
                .collect();
            let outs = net.outgoing(l);
            let base = slot(0) + slot(1) + real.production[l] as f64;
            let (in_lo, in_hi) = sum_bounds(&arrive[0]);
            let (out_lo, mut out_hi) = sum_bounds(outs);
            if let Some(a) = avail[l] {
                out_hi = out_hi.min(a as f64);
            }
            let it_lo = (base + in_lo - out_hi).max(0.0);
            let it_hi = base + in_hi - out_lo;
            let it = m.add_var(format!("{p}inter{l}"), VarKind::Continuous, it_lo, it_hi);
            let mut terms = vec![(it, 1.0)];
            terms.extend(arrive[0].iter().map(|&k| (ship[k], -1.0)));
            terms.extend(outs.iter().map(|&k| (ship[k], 1.0)));
            m.add_con(format!("{p}balance{l}"), terms, Sense::Eq, base);
            sv.inter[l] = Some(it);

            let backorder = spec.is_backorder();
            let owed = (real.demand[l] + if backorder { state.backlog[l] } else { 0 }) as f64;
            let sells = spec.demand.is_some() || backorder || owed > 0.0;
            let mut leftover_hi = it_hi;
            let mut sa_var = None;
            if sells {
                let sa = m.add_var(format!("{p}sales{l}"), VarKind::Continuous, 0.0, owed.min(it_hi).max(0.0));
                m.add_con(format!("{p}sales_stock{l}"), vec![(sa, 1.0), (it, -1.0)], Sense::Le, 0.0);
                if opts.exact_recourse {
                    if it_lo >= owed {
                        m.vars[sa].lb = owed;
                    } else if it_hi <= owed {
                        m.add_con(format!("{p}sales_all{l}"), vec![(sa, 1.0), (it, -1.0)], Sense::Ge, 0.0);
                    } else {
                        let u = m.add_var(format!("{p}sales_u{l}"), bin_kind, 0.0, 1.0);
                        let m1 = it_hi - owed;
                        let m2 = owed - it_lo;
                        m.add_con(format!("{p}sales_min_a{l}"), vec![(sa, 1.0), (it, -1.0), (u, m1)], Sense::Ge, 0.0);
                        m.add_con(format!("{p}sales_min_b{l}"), vec![(sa, 1.0), (u, -m2)], Sense::Ge, owed - m2);
                        sv.sales_switch[l] = Some(u);
                    }
                    leftover_hi = (it_hi - owed).max(0.0);
                }
                m.add_obj(sa, w * spec.price);
                sv.sales[l] = Some(sa);
                sa_var = Some(sa);
            }
            let cap = if spec.capacity == UNBOUNDED { f64::INFINITY } else { spec.capacity as f64 };
            let kept = m.add_var(format!("{p}next{l}_0"), VarKind::Continuous, 0.0, cap.min(leftover_hi));
            m.add_obj(kept, -w * spec.holding_cost);
            let mut terms = vec![(kept, 1.0), (it, -1.0)];
            if let Some(sa) = sa_var {
                terms.push((sa, 1.0));
            }
            if leftover_hi > cap {
                let excess = leftover_hi - cap;
                let b = m.add_var(format!("{p}spill{l}"), VarKind::Continuous, 0.0, excess);
                m.add_obj(b, -w * spec.spillage_cost);
                terms.push((b, 1.0));
                if opts.exact_recourse {
                    let v = m.add_var(format!("{p}spill_v{l}"), bin_kind, 0.0, 1.0);
                    m.add_con(format!("{p}spill_on{l}"), vec![(b, 1.0), (v, -excess)], Sense::Le, 0.0);
                    m.add_con(format!("{p}spill_full{l}"), vec![(kept, 1.0), (v, -cap)], Sense::Ge, 0.0);
                    sv.spill_switch[l] = Some(v);
                }
                sv.spill[l] = Some(b);
            }
            m.add_con(format!("{p}leftover{l}"), terms, Sense::Eq, 0.0);
            if backorder {
                let sa = sa_var.expect("backorder nodes sell");
                let bl = m.add_var(format!("{p}backlog{l}"), VarKind::Continuous, 0.0, owed);
                m.add_con(format!("{p}backlog_def{l}"), vec![(bl, 1.0), (sa, 1.0)], Sense::Eq, owed);
                m.add_obj(bl, -w * spec.backorder_cost);
                sv.backlog[l] = Some(bl);
            }
            let mut next = vec![kept];
            let mut salvage = vec![None];
            for (j, links) in arrive.iter().enumerate().skip(1) {
                let carried = slot(j + 1);
                let (lo, hi) = sum_bounds(links);
                let v = m.add_var(format!("{p}next{l}_{j}"), VarKind::Continuous, carried + lo, carried + hi);
                let mut terms = vec![(v, 1.0)];
                terms.extend(links.iter().map(|&k| (ship[k], -1.0)));
                if opts.salvage_all_slots {
                    m.vars[v].lb = 0.0;
                    let b = m.add_var(format!("{p}salvage{l}_{j}"), VarKind::Continuous, 0.0, carried + hi);
                    m.add_obj(b, -w * spec.spillage_cost);
                    terms.push((b, 1.0));
                    salvage.push(Some(b));
                } else {
                    salvage.push(None);
                }
                m.add_con(format!("{p}pipe{l}_{j}"), terms, Sense::Eq, carried);
                next.push(v);
            }
            sv.next[l] = next;
            sv.salvage[l] = salvage;
        }
        let inputs: Vec<NetInput> = slots
            .iter()
            .zip(&critic.input_scale)
            .map(|(s, &scale)| {
                let var = match *s {
                    StateSlot::Pipeline { node, slot } => sv.next[node][slot],
                    StateSlot::Backlog { node } => sv.backlog[node].expect("backlog slot has a variable"),
                };
                NetInput { var, scale }
            })
            .collect();
        let lo: Vec<f64> = inputs.iter().map(|x| m.vars[x.var].lb / x.scale).collect();
        let hi: Vec<f64> = inputs.iter().map(|x| m.vars[x.var].ub / x.scale).collect();
        let bounds = propagate_bounds(&critic.net, &lo, &hi)?;
        let enc = encode_network(&mut m, &critic.net, &bounds, &inputs, &p)?;
        for &(v, c) in &enc.output_terms {
            m.add_obj(v, w * gamma * c);
        }
        m.obj_constant += w * gamma * enc.output_constant;
        sv.critic = enc;
        out.push(sv);
    }
    if int_kind == VarKind::Continuous {
        m.comments.push("integrality relaxed".into());
    }
    Ok(StepProblem { model: m, ship, order, samples: out })
}

impl StepProblem {
    /// Shipments read off a solution vector, rounded to units.
    pub fn action(&self, x: &[f64]) -> Action {
        Action(self.ship.iter().map(|&j| x[j].round() as i64).collect())
    }

    /// The model point that the simulator and the critic assign to `action`.
    ///
    /// Every variable is set to the value implied by replaying the period
    /// under each sample, so the point is feasible exactly when `action` is.
    pub fn lift(
        &self,
        net: &Network,
        state: &PipelineState,
        samples: &[Realization],
        critic: &Critic,
        action: &Action,
    ) -> Result<Vec<f64>, MipError> {
        let mut x = vec![0.0; self.model.vars.len()];
        for (k, &a) in action.0.iter().enumerate() {
            x[self.ship[k]] = a as f64;
            x[self.order[k]] = if a > 0 { 1.0 } else { 0.0 };
        }
        for (sv, real) in self.samples.iter().zip(samples) {
            let (next, rb) = step(net, state, action, real)?;
            for l in 0..net.num_nodes() {
                let Some(it) = sv.inter[l] else { continue };
                let sold = rb.sales[l] as f64;
                let inter = (rb.sales[l] + next.pipelines[l][0] + rb.spilled[l]) as f64;
                x[it] = inter;
                if let Some(v) = sv.sales[l] {
                    x[v] = sold;
                }
                if let Some(u) = sv.sales_switch[l] {
                    x[u] = if sold < inter { 1.0 } else { 0.0 };
                }
                if let Some(b) = sv.spill[l] {
                    x[b] = rb.spilled[l] as f64;
                }
                if let Some(v) = sv.spill_switch[l] {
                    x[v] = if rb.spilled[l] > 0 { 1.0 } else { 0.0 };
                }
                if let Some(b) = sv.backlog[l] {
                    x[b] = next.backlog[l] as f64;
                }
                for (j, &v) in sv.next[l].iter().enumerate() {
                    x[v] = next.pipelines[l][j] as f64;
                }
            }
            let raw = next.to_vector(net);
            let act = critic.net.activations(&critic.scale(&raw))?;
            for (k, layer) in sv.critic.z.iter().enumerate() {
                for (j, &z) in layer.iter().enumerate() {
                    x[z] = act.post[k][j];
                    if let Some(y) = sv.critic.y[k][j] {
                        x[y] = if act.pre[k][j] > 0.0 { 1.0 } else { 0.0 };
                    }
                }
            }
        }
        Ok(x)
    }
}
