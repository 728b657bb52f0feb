use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::base_stock::link_inventory_position;
use super::normal::{inverse_normal_loss, normal_loss, normal_quantile, std_cdf, std_quantile};
use super::HeuristicError;
use crate::env::{Action, Distribution, Network, NodeKind, PipelineState};
use crate::parl::{ParlError, Policy};

/// Three-echelon path data for one retailer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLevel {
    pub warehouse: usize,
    pub q: f64,
    /// Echelon level of the warehouse on this path.
    pub echelon: f64,
    /// `echelon - retailer level`.
    pub local: f64,
    pub shortfall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetailerLevel {
    pub node: usize,
    /// Link the retailer orders on.
    pub link: usize,
    pub level: f64,
    pub path: Option<PathLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarehouseLevel {
    pub node: usize,
    pub link: usize,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DALevels {
    pub retailers: Vec<RetailerLevel>,
    pub warehouses: Vec<WarehouseLevel>,
}

fn normal_demand(net: &Network, node: usize) -> Result<(f64, f64), HeuristicError> {
    match net.node(node).demand {
        Some(Distribution::Normal { mean, std }) => Ok((mean, std)),
        Some(Distribution::Const(v)) => Ok((v, 0.0)),
        other => Err(HeuristicError::NonNormal(format!(
            "{}: {}",
            net.node(node).id,
            other.map_or("no demand".to_string(), |d| d.to_string())
        ))),
    }
}

fn lead_demand_quantile(mu: f64, sigma: f64, periods: f64, q: f64) -> Result<f64, HeuristicError> {
    if sigma == 0.0 {
        if q > 0.0 && q < 1.0 {
            return Ok(mu * periods);
        }
        return Err(HeuristicError::InvalidQuantile(q));
    }
    normal_quantile(mu * periods, sigma * periods.sqrt(), q)
}

/// Shortest-lead incoming link of a retailer; lower index on ties.
fn primary_link(net: &Network, node: usize) -> Option<usize> {
    net.incoming(node).iter().copied().min_by_key(|&k| (net.link(k).lead_time, k))
}

/// Order-up-to levels from the decomposition by serial paths and the
/// shortfall-matching aggregation at each warehouse.
pub fn da_levels(net: &Network) -> Result<DALevels, HeuristicError> {
    let mut retailers = Vec::new();
    let mut by_warehouse: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); net.num_nodes()];
    for r in net.retailers() {
        let (mu, sigma) = normal_demand(net, r)?;
        let link = primary_link(net, r)
            .ok_or_else(|| HeuristicError::NotTree(format!("retailer {} has no supplier", net.node(r).id)))?;
        let up = net.link_from(link);
        let spec = net.node(r);
        let lr = net.link(link).lead_time as f64;
        match net.node(up).kind {
            NodeKind::Supplier => {
                let b = spec.price - net.link(link).variable_cost;
                let level = lead_demand_quantile(mu, sigma, lr + 1.0, b / (b + spec.holding_cost))?;
                retailers.push(RetailerLevel { node: r, link, level, path: None });
            }
            NodeKind::Warehouse => {
                let feed = match net.incoming(up) {
                    [k] if net.node(net.link_from(*k)).kind == NodeKind::Supplier => *k,
                    _ => {
                        return Err(HeuristicError::NotTree(format!(
                            "warehouse {} must have exactly one supplier link",
                            net.node(up).id
                        )))
                    }
                };
                let lw = net.link(feed).lead_time as f64;
                let b = spec.price - net.link(link).variable_cost - net.link(feed).variable_cost;
                let (hr, hw) = (spec.holding_cost, net.node(up).holding_cost);
                let level = lead_demand_quantile(mu, sigma, lr + 1.0, (b + hw) / (b + hr))?;
                // A free warehouse puts the second ratio at exactly 1.
                let upper = (b / (b + hw)).min(1.0 - f64::EPSILON);
                let q = std_cdf(0.5 * std_quantile(b / (b + hr))? + 0.5 * std_quantile(upper)?);
                let echelon = lead_demand_quantile(mu, sigma, lr + lw + 1.0, q)?;
                let local = echelon - level;
                let shortfall = normal_loss(mu * lw, sigma * lw.sqrt(), local);
                by_warehouse[up].push((mu, sigma, shortfall));
                retailers.push(RetailerLevel {
                    node: r,
                    link,
                    level,
                    path: Some(PathLevel { warehouse: up, q, echelon, local, shortfall }),
                });
            }
            NodeKind::Retailer => {
                return Err(HeuristicError::NotTree(format!("retailer {} feeds retailer {}", net.node(up).id, spec.id)))
            }
        }
    }
    let mut warehouses = Vec::new();
    for (w, paths) in by_warehouse.iter().enumerate() {
        if paths.is_empty() {
            continue;
        }
        let link = net.incoming(w)[0];
        let lw = net.link(link).lead_time as f64;
        let mean: f64 = paths.iter().map(|p| p.0 * lw).sum();
        let std = paths.iter().map(|p| p.1 * p.1 * lw).sum::<f64>().sqrt();
        let target: f64 = paths.iter().map(|p| p.2).sum();
        let level = if std == 0.0 { mean - target } else { inverse_normal_loss(mean, std, target.max(f64::MIN_POSITIVE))? };
        warehouses.push(WarehouseLevel { node: w, link, level });
    }
    Ok(DALevels { retailers, warehouses })
}

fn rounded(level: f64) -> i64 {
    level.round().max(0.0) as i64
}

/// Order-up-to on each ordering link's inventory position. Links that are
/// not a retailer's primary link or a warehouse feed stay idle.
pub fn da_action(net: &Network, levels: &DALevels, state: &PipelineState) -> Action {
    let mut a = Action::zeros(net);
    let targets = levels
        .retailers
        .iter()
        .map(|r| (r.link, r.level))
        .chain(levels.warehouses.iter().map(|w| (w.link, w.level)));
    for (k, level) in targets {
        let ip = link_inventory_position(net, state, k);
        a.0[k] = (rounded(level) - ip).clamp(0, net.link(k).max_order);
    }
    a
}

#[derive(Debug, Clone)]
pub struct DaPolicy {
    pub levels: DALevels,
}

impl Policy for DaPolicy {
    fn name(&self) -> String {
        "da".into()
    }

    fn act(&self, net: &Network, state: &PipelineState, _rng: &mut ChaCha8Rng) -> Result<Action, ParlError> {
        Ok(da_action(net, &self.levels, state))
    }
}
