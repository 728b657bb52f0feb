//! Policy iteration for multi-echelon inventory control with a
//! mixed-integer actor over a ReLU critic.

pub mod bench;
pub mod env;
pub mod heuristics;
pub mod mip;
pub mod parl;
pub mod solver;
pub mod valuenet;
