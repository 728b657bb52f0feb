use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::base_stock::{BaseStockParams, SsPair};
use super::da::DALevels;
use super::HeuristicError;
use crate::env::Network;

/// One JSON line: a link's `(s, S)` pair or a node's order-up-to level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeuristicRecord {
    Link {
        link: String,
        s: i64,
        #[serde(rename = "S")]
        big_s: i64,
    },
    Node {
        node: String,
        level: f64,
    },
}

impl HeuristicRecord {
    pub fn from_base_stock(net: &Network, params: &BaseStockParams) -> Vec<Self> {
        params
            .links
            .iter()
            .enumerate()
            .map(|(k, p)| HeuristicRecord::Link { link: net.link(k).name(), s: p.s, big_s: p.big_s })
            .collect()
    }

    pub fn from_da(net: &Network, levels: &DALevels) -> Vec<Self> {
        let r = levels.retailers.iter().map(|r| (r.node, r.level));
        let w = levels.warehouses.iter().map(|w| (w.node, w.level));
        r.chain(w).map(|(i, level)| HeuristicRecord::Node { node: net.node(i).id.clone(), level }).collect()
    }
}

pub fn write_params<W: Write>(mut out: W, records: &[HeuristicRecord]) -> Result<(), HeuristicError> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| HeuristicError::Params(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_params<R: BufRead>(input: R) -> Result<Vec<HeuristicRecord>, HeuristicError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| HeuristicError::Parse { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

/// Rebuilds per-link base stock parameters from link records.
pub fn base_stock_from_records(net: &Network, records: &[HeuristicRecord]) -> Result<BaseStockParams, HeuristicError> {
    let mut links: Vec<Option<SsPair>> = vec![None; net.num_links()];
    for r in records {
        if let HeuristicRecord::Link { link, s, big_s } = r {
            let k = (0..net.num_links())
                .find(|&k| &net.link(k).name() == link)
                .ok_or_else(|| HeuristicError::Params(format!("unknown link {link}")))?;
            links[k] = Some(SsPair::new(*s, *big_s)?);
        }
    }
    let links = links
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| HeuristicError::Params(format!("no parameters for link {}", net.link(k).name()))))
        .collect::<Result<_, _>>()?;
    Ok(BaseStockParams { links })
}
