//! Simulator of a heterogeneous wireless federated-learning network.
//!
//! The crate models `N` energy-harvesting users that train a shared model
//! over OFDMA uplinks. Each global round a scheduler picks a user subset, a
//! resource allocator jointly optimizes CPU frequency, subcarrier assignment
//! and transmit power for that subset, and the federated loop runs local SGD
//! plus biased aggregation on a synthetic classification task. Negated round
//! completion times reward a PPO agent that learns to schedule for minimum
//! long-term wall-clock convergence time; greedy, random, gradient-weighted
//! and ascending baselines provide the comparison points.

pub mod config;
pub mod nn;
pub mod error;
pub mod phy;
pub mod records;
pub mod rng;

pub use config::{load_config, SimConfig, UserProfile};
pub use error::{Result, SimError};
