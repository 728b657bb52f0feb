use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::network::Network;
use super::state::{Action, PipelineState, Realization, RewardBreakdown};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("action has {got} entries, network has {want} links")]
    ActionLength { got: usize, want: usize },
    #[error("link `{link}`: shipment {value} outside 0..={max}")]
    ActionBounds { link: String, value: i64, max: i64 },
    #[error("node `{node}` ships {shipped} units but only {available} are on hand")]
    Oversupply { node: String, shipped: i64, available: i64 },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("horizon {horizon} exceeds the {len} pipeline slots of `{node}`")]
    Horizon { node: String, horizon: usize, len: usize },
    #[error("invalid state: {0}")]
    State(String),
}

/// Draws every pipeline slot from the node's initial-inventory distribution.
pub fn reset_with<R: Rng + ?Sized>(net: &Network, rng: &mut R) -> PipelineState {
    let mut st = PipelineState::zeros(net);
    let default = net.config().initial_inventory;
    for i in 0..net.num_nodes() {
        let d = net.node(i).initial_inventory.unwrap_or(default);
        for v in st.pipelines[i].iter_mut() {
            *v = d.sample_units(rng);
        }
    }
    st
}

pub fn reset(net: &Network, seed: u64) -> PipelineState {
    reset_with(net, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Demand for every demand node, then production for every producing node.
pub fn sample_uncertainty<R: Rng + ?Sized>(net: &Network, rng: &mut R) -> Realization {
    let n = net.num_nodes();
    let mut r = Realization::zeros(n);
    for i in 0..n {
        if let Some(d) = net.node(i).demand {
            r.demand[i] = d.sample_units(rng);
        }
    }
    for i in 0..n {
        let node = net.node(i);
        if let (Some(p), false) = (node.production, node.infinite_supply) {
            r.production[i] = p.sample_units(rng);
        }
    }
    r
}

/// Units a node may ship this period: on-hand plus the slot arriving now.
/// `None` for infinite-supply nodes.
pub fn available_supply(net: &Network, state: &PipelineState, node: usize) -> Option<i64> {
    if net.node(node).infinite_supply {
        return None;
    }
    let p = &state.pipelines[node];
    Some(p.first().copied().unwrap_or(0) + p.get(1).copied().unwrap_or(0))
}

/// Scales outgoing requests of every over-committed source down to its
/// available supply with largest-remainder rounding.
///
/// Remainder ties go first to the request with the smaller floor share and
/// then to the lower link index.
pub fn apply_proportional_fulfillment(
    net: &Network,
    state: &PipelineState,
    requested: &Action,
) -> Action {
    let mut out = requested.0.clone();
    for v in out.iter_mut() {
        *v = (*v).max(0);
    }
    for node in 0..net.num_nodes() {
        let Some(avail) = available_supply(net, state, node) else { continue };
        let links = net.outgoing(node);
        let total: i64 = links.iter().map(|&k| out[k]).sum();
        if total <= avail {
            continue;
        }
        let avail = avail.max(0) as i128;
        let total = total as i128;
        let mut shares: Vec<(usize, i128, i128)> = links
            .iter()
            .map(|&k| {
                let num = out[k] as i128 * avail;
                (k, num / total, num % total)
            })
            .collect();
        let mut left = avail - shares.iter().map(|s| s.1).sum::<i128>();
        let mut order: Vec<usize> = (0..shares.len()).collect();
        order.sort_by(|&a, &b| {
            let (ka, fa, ra) = shares[a];
            let (kb, fb, rb) = shares[b];
            rb.cmp(&ra).then(fa.cmp(&fb)).then(ka.cmp(&kb))
        });
        for &j in &order {
            if left == 0 {
                break;
            }
            shares[j].1 += 1;
            left -= 1;
        }
        for (k, v, _) in shares {
            out[k] = v as i64;
        }
    }
    Action(out)
}

fn check_action(net: &Network, state: &PipelineState, action: &Action) -> Result<(), EnvError> {
    if action.0.len() != net.num_links() {
        return Err(EnvError::ActionLength { got: action.0.len(), want: net.num_links() });
    }
    for (k, &x) in action.0.iter().enumerate() {
        let max = net.link(k).max_order;
        if x < 0 || x > max {
            return Err(EnvError::ActionBounds { link: net.link(k).name(), value: x, max });
        }
    }
    for node in 0..net.num_nodes() {
        if let Some(avail) = available_supply(net, state, node) {
            let shipped: i64 = net.outgoing(node).iter().map(|&k| action.0[k]).sum();
            if shipped > avail {
                return Err(EnvError::Oversupply {
                    node: net.node(node).id.clone(),
                    shipped,
                    available: avail,
                });
            }
        }
    }
    Ok(())
}

/// One period of the dynamics. Pure in its arguments.
pub fn step(
    net: &Network,
    state: &PipelineState,
    action: &Action,
    real: &Realization,
) -> Result<(PipelineState, RewardBreakdown), EnvError> {
    check_action(net, state, action)?;
    let n = net.num_nodes();
    let mut next = PipelineState {
        pipelines: Vec::with_capacity(n),
        backlog: vec![0; n],
        period: state.period + 1,
    };
    let mut rb = RewardBreakdown {
        rs: vec![0.0; n],
        tsc: vec![0.0; n],
        hsc: vec![0.0; n],
        boc: vec![0.0; n],
        sales: vec![0; n],
        spilled: vec![0; n],
        total: 0.0,
    };
    for l in 0..n {
        let spec = net.node(l);
        for &k in net.incoming(l) {
            let x = action.0[k];
            let link = net.link(k);
            if x > 0 {
                rb.tsc[l] += link.fixed_cost + link.variable_cost * x as f64;
            }
        }
        let len = net.pipe_len(l);
        if len == 0 {
            next.pipelines.push(Vec::new());
            continue;
        }
        let p = &state.pipelines[l];
        let slot = |j: usize| p.get(j).copied().unwrap_or(0);
        let arrivals = |j: usize| -> i64 {
            net.incoming(l)
                .iter()
                .filter(|&&k| net.link(k).lead_time == j)
                .map(|&k| action.0[k])
                .sum()
        };
        let outgoing: i64 = net.outgoing(l).iter().map(|&k| action.0[k]).sum();
        let inter = slot(0) + slot(1) + real.production[l] + arrivals(0) - outgoing;
        let backorder = spec.is_backorder();
        let owed = real.demand[l] + if backorder { state.backlog[l] } else { 0 };
        let sold = owed.min(inter).max(0);
        let leftover = inter - sold;
        let kept = leftover.min(spec.capacity);
        let spill = leftover - kept;
        rb.rs[l] = spec.price * sold as f64;
        rb.hsc[l] = spec.holding_cost * kept as f64 + spec.spillage_cost * spill as f64;
        if backorder {
            next.backlog[l] = owed - sold;
            rb.boc[l] = spec.backorder_cost * next.backlog[l] as f64;
        }
        rb.sales[l] = sold;
        rb.spilled[l] = spill;
        let mut np = vec![0i64; len];
        np[0] = kept;
        for (j, v) in np.iter_mut().enumerate().skip(1) {
            *v = slot(j + 1) + arrivals(j);
        }
        next.pipelines.push(np);
    }
    rb.total = (0..n).map(|l| rb.rs[l] - rb.tsc[l] - rb.hsc[l] - rb.boc[l]).sum();
    Ok((next, rb))
}

/// On-hand plus pipeline slots `1..=horizon`, net of backlog.
pub fn inventory_position(
    net: &Network,
    state: &PipelineState,
    node: &str,
    horizon: usize,
) -> Result<i64, EnvError> {
    let i = net.node_index(node).ok_or_else(|| EnvError::UnknownNode(node.to_string()))?;
    inventory_position_at(net, state, i, horizon)
}

pub fn inventory_position_at(
    net: &Network,
    state: &PipelineState,
    i: usize,
    horizon: usize,
) -> Result<i64, EnvError> {
    let p = &state.pipelines[i];
    if horizon >= p.len() {
        return Err(EnvError::Horizon { node: net.node(i).id.clone(), horizon, len: p.len() });
    }
    Ok(p.iter().take(horizon + 1).sum::<i64>() - state.backlog[i])
}

/// A simulator instance: network, current state and its own random stream.
#[derive(Debug, Clone)]
pub struct Env {
    pub net: Network,
    pub state: PipelineState,
    rng: ChaCha8Rng,
}

impl Env {
    pub fn new(net: Network, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = reset_with(&net, &mut rng);
        Env { net, state, rng }
    }

    pub fn reset(&mut self) -> &PipelineState {
        self.state = reset_with(&self.net, &mut self.rng);
        &self.state
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Fulfils the request proportionally, draws the uncertainty and
    /// advances one period.
    pub fn step(&mut self, requested: &Action) -> Result<(Action, Realization, RewardBreakdown), EnvError> {
        let action = apply_proportional_fulfillment(&self.net, &self.state, requested);
        let real = sample_uncertainty(&self.net, &mut self.rng);
        let (next, rb) = step(&self.net, &self.state, &action, &real)?;
        self.state = next;
        Ok((action, real, rb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::config::parse_config;

    fn one_retailer(lead: usize, price: f64, cap: i64, spill: f64) -> Network {
        let doc = format!(
            "[node.S]\nkind = supplier\nproduction = const(0)\ncapacity = 100\n\
             [node.R]\nkind = retailer\ndemand = normal(2,10)\nprice = {price}\nholding_cost = 1\n\
             capacity = {cap}\nspillage_cost = {spill}\n\
             [link.S.R]\nlead_time = {lead}\nmax_order = 50\n"
        );
        Network::new(parse_config(&doc).unwrap()).unwrap()
    }

    #[test]
    fn retailer_sells_and_holds() {
        let net = one_retailer(1, 50.0, 50, 10.0);
        let st = PipelineState { pipelines: vec![vec![0], vec![5, 0]], backlog: vec![0, 0], period: 0 };
        let real = Realization { demand: vec![0, 2], production: vec![0, 0] };
        let (next, rb) = step(&net, &st, &Action(vec![0]), &real).unwrap();
        assert_eq!(rb.rs[1], 100.0);
        assert_eq!(rb.hsc[1], 3.0);
        assert_eq!(rb.total, 97.0);
        assert_eq!(next.pipelines[1], vec![3, 0]);
    }

    #[test]
    fn zero_everything_only_rotates() {
        let net = one_retailer(2, 50.0, 50, 10.0);
        let st = PipelineState::zeros(&net);
        let (next, rb) = step(&net, &st, &Action(vec![0]), &Realization::zeros(2)).unwrap();
        assert_eq!(rb.total, 0.0);
        assert_eq!(next.pipelines, st.pipelines);
        assert_eq!(next.period, 1);
    }

    #[test]
    fn overflow_is_spilled() {
        let net = one_retailer(1, 50.0, 50, 10.0);
        let st = PipelineState { pipelines: vec![vec![0], vec![60, 0]], backlog: vec![0, 0], period: 0 };
        let (next, rb) = step(&net, &st, &Action(vec![0]), &Realization::zeros(2)).unwrap();
        assert_eq!(rb.hsc[1], 150.0);
        assert_eq!(next.pipelines[1][0], 50);
        assert_eq!(rb.spilled[1], 10);
    }

    #[test]
    fn oversupply_is_rejected() {
        let net = one_retailer(1, 50.0, 50, 10.0);
        let st = PipelineState { pipelines: vec![vec![3], vec![0, 0]], backlog: vec![0, 0], period: 0 };
        let err = step(&net, &st, &Action(vec![4]), &Realization::zeros(2)).unwrap_err();
        assert!(matches!(err, EnvError::Oversupply { .. }));
    }

    #[test]
    fn fixed_cost_only_when_shipping() {
        let doc = "[node.S]\nkind = supplier\nproduction = const(0)\ncapacity = 100\n\
                   [node.R]\nkind = retailer\ndemand = const(0)\ncapacity = 50\n\
                   [link.S.R]\nlead_time = 1\nmax_order = 50\nfixed_cost = 50\nvariable_cost = 2\n";
        let net = Network::new(parse_config(doc).unwrap()).unwrap();
        let st = PipelineState { pipelines: vec![vec![10], vec![0, 0]], backlog: vec![0, 0], period: 0 };
        let (next, rb) = step(&net, &st, &Action(vec![3]), &Realization::zeros(2)).unwrap();
        assert_eq!(rb.tsc[1], 56.0);
        assert_eq!(next.pipelines[1], vec![0, 3]);
        assert_eq!(next.pipelines[0], vec![7]);
    }

    fn fan_out() -> (Network, PipelineState) {
        let doc = "[node.S]\nkind = supplier\nproduction = const(0)\ncapacity = 100\n\
                   [node.R1..R2]\nkind = retailer\ndemand = const(0)\ncapacity = 50\n\
                   [link.S.R1..R2]\nlead_time = 1\nmax_order = 50\n";
        let net = Network::new(parse_config(doc).unwrap()).unwrap();
        let st = PipelineState::zeros(&net);
        (net, st)
    }

    #[test]
    fn proportional_fulfillment_examples() {
        let (net, mut st) = fan_out();
        st.pipelines[0][0] = 4;
        let req = Action(vec![5, 3]);
        assert_eq!(apply_proportional_fulfillment(&net, &st, &req).0, vec![2, 2]);
        st.pipelines[0][0] = 10;
        assert_eq!(apply_proportional_fulfillment(&net, &st, &req).0, vec![5, 3]);
        st.pipelines[0][0] = 0;
        assert_eq!(apply_proportional_fulfillment(&net, &st, &req).0, vec![0, 0]);
        st.pipelines[0][0] = 3;
        // equal requests, equal remainders: the lower index wins
        assert_eq!(apply_proportional_fulfillment(&net, &st, &Action(vec![4, 4])).0, vec![2, 1]);
    }

    #[test]
    fn inventory_position_nets_backlog() {
        let doc = "[node.S]\nkind = supplier\ninfinite_supply = true\n\
                   [node.R]\nkind = retailer\ndemand = normal(5,0.8)\ncapacity = 100\n\
                   demand_type = backorder\nbackorder_cost = 7\n\
                   [link.S.R]\nlead_time = 2\nmax_order = 20\n";
        let net = Network::new(parse_config(doc).unwrap()).unwrap();
        let mut st = PipelineState::zeros(&net);
        st.pipelines[1] = vec![3, 2, 1];
        assert_eq!(inventory_position(&net, &st, "R", 2).unwrap(), 6);
        st.backlog[1] = 4;
        assert_eq!(inventory_position(&net, &st, "R", 2).unwrap(), 2);
        st.backlog[1] = 0;
        st.pipelines[1] = vec![0, 0, 0];
        assert_eq!(inventory_position(&net, &st, "R", 2).unwrap(), 0);
        assert!(matches!(
            inventory_position(&net, &st, "X", 0),
            Err(EnvError::UnknownNode(_))
        ));
        assert!(inventory_position(&net, &st, "R", 3).is_err());
    }

    #[test]
    fn backorder_accumulates_and_is_penalized() {
        let doc = "[node.S]\nkind = supplier\ninfinite_supply = true\n\
                   [node.R]\nkind = retailer\ndemand = normal(5,0.8)\ncapacity = 100\nholding_cost = 0.8\n\
                   demand_type = backorder\nbackorder_cost = 7\n\
                   [link.S.R]\nlead_time = 1\nmax_order = 20\n";
        let net = Network::new(parse_config(doc).unwrap()).unwrap();
        let mut st = PipelineState::zeros(&net);
        st.pipelines[1] = vec![2, 0];
        st.backlog[1] = 1;
        let real = Realization { demand: vec![0, 5], production: vec![0, 0] };
        let (next, rb) = step(&net, &st, &Action(vec![7]), &real).unwrap();
        assert_eq!(rb.sales[1], 2);
        assert_eq!(next.backlog[1], 4);
        assert_eq!(rb.boc[1], 28.0);
        assert_eq!(rb.total, -28.0);
        assert_eq!(next.pipelines[1], vec![0, 7]);
        assert_eq!(rb.tsc[1], 0.0);
    }
}
