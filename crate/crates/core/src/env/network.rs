use super::config::{ConfigError, LinkSpec, NetworkConfig, NodeKind, NodeSpec};

/// A validated configuration together with the adjacency and pipeline
/// layout derived from it.
#[derive(Debug, Clone)]
pub struct Network {
    cfg: NetworkConfig,
    link_from: Vec<usize>,
    link_to: Vec<usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    pipe_len: Vec<usize>,
}

/// One coordinate of the flattened state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSlot {
    Pipeline { node: usize, slot: usize },
    Backlog { node: usize },
}

impl Network {
    pub fn new(cfg: NetworkConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let n = cfg.nodes.len();
        let idx = |id: &str| cfg.node_index(id).expect("validated link endpoint");
        let link_from: Vec<usize> = cfg.links.iter().map(|l| idx(&l.from)).collect();
        let link_to: Vec<usize> = cfg.links.iter().map(|l| idx(&l.to)).collect();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for k in 0..cfg.links.len() {
            incoming[link_to[k]].push(k);
            outgoing[link_from[k]].push(k);
        }
        let pipe_len = (0..n)
            .map(|i| {
                if cfg.nodes[i].infinite_supply {
                    0
                } else {
                    1 + incoming[i].iter().map(|&k| cfg.links[k].lead_time).max().unwrap_or(0)
                }
            })
            .collect();
        Ok(Network { cfg, link_from, link_to, incoming, outgoing, pipe_len })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn num_nodes(&self) -> usize {
        self.cfg.nodes.len()
    }

    pub fn num_links(&self) -> usize {
        self.cfg.links.len()
    }

    pub fn node(&self, i: usize) -> &NodeSpec {
        &self.cfg.nodes[i]
    }

    pub fn link(&self, k: usize) -> &LinkSpec {
        &self.cfg.links[k]
    }

    pub fn link_from(&self, k: usize) -> usize {
        self.link_from[k]
    }

    pub fn link_to(&self, k: usize) -> usize {
        self.link_to[k]
    }

    pub fn incoming(&self, i: usize) -> &[usize] {
        &self.incoming[i]
    }

    pub fn outgoing(&self, i: usize) -> &[usize] {
        &self.outgoing[i]
    }

    /// Number of pipeline slots of node `i` (0 for infinite-supply nodes).
    pub fn pipe_len(&self, i: usize) -> usize {
        self.pipe_len[i]
    }

    pub fn is_tracked(&self, i: usize) -> bool {
        self.pipe_len[i] > 0
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.cfg.node_index(id)
    }

    pub fn retailers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|&i| self.cfg.nodes[i].kind == NodeKind::Retailer)
    }

    pub fn state_slots(&self) -> Vec<StateSlot> {
        let mut out = Vec::new();
        for i in 0..self.num_nodes() {
            for slot in 0..self.pipe_len[i] {
                out.push(StateSlot::Pipeline { node: i, slot });
            }
            if self.is_tracked(i) && self.cfg.nodes[i].is_backorder() {
                out.push(StateSlot::Backlog { node: i });
            }
        }
        out
    }

    pub fn state_dim(&self) -> usize {
        self.state_slots().len()
    }

    /// Largest value each state coordinate can take after a transition.
    ///
    /// On-hand is capped by storage capacity, slot `j` by the total order
    /// size of incoming links with lead time at least `j`, the backlog by the
    /// configured cap. The initial-inventory support widens every pipeline
    /// bound so that reset states are also inside the box.
    pub fn state_upper_bounds(&self) -> Vec<f64> {
        self.state_slots()
            .into_iter()
            .map(|s| match s {
                StateSlot::Pipeline { node, slot } => {
                    let init = self.initial_max(node) as f64;
                    let b = if slot == 0 {
                        self.cfg.nodes[node].capacity as f64
                    } else {
                        self.incoming[node]
                            .iter()
                            .filter(|&&k| self.cfg.links[k].lead_time >= slot)
                            .map(|&k| self.cfg.links[k].max_order as f64)
                            .sum()
                    };
                    b.max(init)
                }
                StateSlot::Backlog { node } => self.cfg.nodes[node].backlog_cap as f64,
            })
            .collect()
    }

    /// Per-coordinate divisor applied before the value network.
    pub fn feature_scale(&self) -> Vec<f64> {
        self.state_upper_bounds().into_iter().map(|b| b.max(1.0)).collect()
    }

    fn initial_max(&self, node: usize) -> i64 {
        let d = self.cfg.nodes[node].initial_inventory.unwrap_or(self.cfg.initial_inventory);
        d.max_units().unwrap_or(0)
    }

    /// Product of per-link action ranges, saturating.
    pub fn action_space_size(&self) -> u128 {
        self.cfg
            .links
            .iter()
            .map(|l| (l.max_order - l.min_order + 1) as u128)
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    /// Random dimensions: retailer demands then supplier productions whose
    /// distributions are not constant.
    pub fn uncertainty_dims(&self) -> Vec<Uncertainty> {
        let mut dims = Vec::new();
        for (i, n) in self.cfg.nodes.iter().enumerate() {
            if let Some(d) = n.demand {
                if d.is_random() {
                    dims.push(Uncertainty::Demand(i));
                }
            }
        }
        for (i, n) in self.cfg.nodes.iter().enumerate() {
            if let Some(d) = n.production {
                if d.is_random() && !n.infinite_supply {
                    dims.push(Uncertainty::Production(i));
                }
            }
        }
        dims
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uncertainty {
    Demand(usize),
    Production(usize),
}
