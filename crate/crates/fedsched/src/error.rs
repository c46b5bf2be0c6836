//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    /// A configuration field failed validation.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    /// Argument outside an operation's domain (bad shape, bad range, ...).
    #[error("{0}")]
    Domain(String),

    /// Transmission rate is zero or negative; the caller decides whether to
    /// drop the user or abort.
    #[error("transmission rate is not positive; upload infeasible")]
    InfeasibleRate,

    /// The allocator could not find any feasible iterate for these users.
    #[error("no feasible allocation for users {users:?}")]
    InfeasibleRound { users: Vec<usize> },

    /// Every scheduled user was dropped; the round cannot proceed.
    #[error("all scheduled users dropped in round {round}")]
    EmptyRound { round: usize },

    /// Model weights became NaN/Inf during local training.
    #[error("model diverged (non-finite weights) at epoch {epoch}")]
    Diverged { epoch: usize },

    /// Energy bookkeeping was asked to spend more than a budget allows.
    /// Signals an allocator bug, not a simulation outcome.
    #[error("energy contract violated: {0}")]
    EnergyContract(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
