//! Multi-echelon inventory simulator and its configuration format.

pub mod config;
pub mod dist;
pub mod log;
pub mod network;
pub mod presets;
pub mod sim;
pub mod state;

pub use config::{parse_config, ConfigError, DemandType, LinkSpec, NetworkConfig, NodeKind, NodeSpec};
pub use dist::{discretize, Distribution};
pub use network::{Network, StateSlot, Uncertainty};
pub use presets::{preset, preset_document, Preset, Scale};
pub use sim::{
    apply_proportional_fulfillment, available_supply, inventory_position, inventory_position_at,
    reset, reset_with, sample_uncertainty, step, Env, EnvError,
};
pub use state::{Action, PipelineState, Realization, RewardBreakdown};
