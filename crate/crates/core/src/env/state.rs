use serde::{Deserialize, Serialize};

use super::network::{Network, StateSlot};

/// Inventory pipelines of every tracked node plus retailer backlogs.
///
/// `pipelines[l][0]` is on-hand inventory, `pipelines[l][j]` the units that
/// become available `j` periods from now. Infinite-supply nodes keep an
/// empty pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PipelineState {
    pub pipelines: Vec<Vec<i64>>,
    pub backlog: Vec<i64>,
    pub period: u64,
}

impl PipelineState {
    pub fn zeros(net: &Network) -> Self {
        PipelineState {
            pipelines: (0..net.num_nodes()).map(|i| vec![0; net.pipe_len(i)]).collect(),
            backlog: vec![0; net.num_nodes()],
            period: 0,
        }
    }

    pub fn on_hand(&self, node: usize) -> i64 {
        self.pipelines[node].first().copied().unwrap_or(0)
    }

    /// Flattened coordinates in [`Network::state_slots`] order.
    pub fn to_vector(&self, net: &Network) -> Vec<f64> {
        net.state_slots()
            .into_iter()
            .map(|s| match s {
                StateSlot::Pipeline { node, slot } => self.pipelines[node][slot] as f64,
                StateSlot::Backlog { node } => self.backlog[node] as f64,
            })
            .collect()
    }

    /// Total units held on hand or in transit across tracked nodes.
    pub fn total_units(&self) -> i64 {
        self.pipelines.iter().flatten().sum()
    }

    /// Checks the shape and sign invariants against `net`.
    pub fn check(&self, net: &Network) -> Result<(), String> {
        if self.pipelines.len() != net.num_nodes() || self.backlog.len() != net.num_nodes() {
            return Err("state does not match the network size".into());
        }
        for i in 0..net.num_nodes() {
            if self.pipelines[i].len() != net.pipe_len(i) {
                return Err(format!(
                    "node `{}` has {} pipeline slots, expected {}",
                    net.node(i).id,
                    self.pipelines[i].len(),
                    net.pipe_len(i)
                ));
            }
            if self.pipelines[i].iter().any(|&v| v < 0) {
                return Err(format!("node `{}` has negative inventory", net.node(i).id));
            }
            if self.backlog[i] < 0 || (self.backlog[i] > 0 && !net.node(i).is_backorder()) {
                return Err(format!("node `{}` has an invalid backlog", net.node(i).id));
            }
        }
        Ok(())
    }
}

/// Units shipped on each link, in configuration link order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action(pub Vec<i64>);

impl Action {
    pub fn zeros(net: &Network) -> Self {
        Action(vec![0; net.num_links()])
    }
}

/// One draw of the uncertainty: demand and production per node (zero where
/// not applicable).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Realization {
    pub demand: Vec<i64>,
    pub production: Vec<i64>,
}

impl Realization {
    pub fn zeros(n: usize) -> Self {
        Realization { demand: vec![0; n], production: vec![0; n] }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub rs: Vec<f64>,
    pub tsc: Vec<f64>,
    pub hsc: Vec<f64>,
    /// Backlog penalty, nonzero only at backorder retailers.
    pub boc: Vec<f64>,
    pub sales: Vec<i64>,
    pub spilled: Vec<i64>,
    pub total: f64,
}

impl RewardBreakdown {
    pub fn revenue(&self) -> f64 {
        self.rs.iter().sum()
    }

    pub fn ordering_cost(&self) -> f64 {
        self.tsc.iter().sum()
    }

    pub fn holding_cost(&self) -> f64 {
        self.hsc.iter().sum()
    }

    pub fn backorder_cost(&self) -> f64 {
        self.boc.iter().sum()
    }
}
