//! Baseline policies: per-link `(s, S)` base stock tuned by simulation,
//! the decomposition-aggregation echelon heuristic, and the closed-form
//! single-retailer order-up-to level.

pub mod base_stock;
pub mod da;
pub mod io;
pub mod normal;

use thiserror::Error;

pub use base_stock::{
    base_stock_action, coarse_grid, grid_search_base_stock, link_inventory_position, refined_grid, surrogate_network,
    tune_base_stock, BaseStockParams, BaseStockPolicy, GridPoint, GridResult, SsPair,
};
pub use da::{da_action, da_levels, DALevels, DaPolicy, PathLevel, RetailerLevel, WarehouseLevel};
pub use io::{base_stock_from_records, read_params, write_params, HeuristicRecord};
pub use normal::{analytic_order_up_to, inverse_normal_loss, normal_loss, normal_quantile};

#[derive(Debug, Error)]
pub enum HeuristicError {
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("quantile {0} outside (0, 1)")]
    InvalidQuantile(f64),
    #[error("network is not a tree: {0}")]
    NotTree(String),
    #[error("demand is not normal: {0}")]
    NonNormal(String),
    #[error("invalid heuristic parameters: {0}")]
    Params(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
