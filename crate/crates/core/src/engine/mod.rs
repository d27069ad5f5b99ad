//! Modified SARSA learner.
//!
//! Each episode selects the full loop-free action list first, pushes it as
//! one segment-routed learning packet, then updates the local and global
//! tables in the order the actions were performed.

mod convergence;
mod route;
mod select;
mod table;
mod update;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use convergence::detect_convergence;
pub use route::{find_route, EpisodeTrace, Learner, LearningRun, RouteRequest};
pub use select::{find_final_path, find_temp_path};
pub use table::{init_local_table, QTable};
pub use update::{sarsa_update, update_table};

use crate::net::{NetError, NodeId};
use crate::rewards::{QoSWeights, RewardError};
use crate::sim::SimError;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("table has {found} states, graph has {expected} nodes")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("global table's absent entries do not match the graph's links")]
    AdjacencyMismatch,
    #[error("no link behind table entry ({state}, {action})")]
    AbsentEntry { state: NodeId, action: NodeId },
    #[error("non-finite table value {0}")]
    NonFinite(f64),
    #[error("no rewards to apply")]
    EmptyRewards,
    #[error("episode count must be positive")]
    ZeroEpisodes,
    #[error("source node {0} has no outgoing links")]
    UnroutableSource(NodeId),
    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),
}

/// Learning controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Probability of a uniformly random next hop.
    pub epsilon: f64,
    /// Learning rate.
    pub alpha: f64,
    /// Weight of the next action's value.
    pub gamma: f64,
    /// Maximum hops per episode.
    pub ttl: usize,
    /// Training episodes per demand.
    pub episodes: usize,
    /// Value bootstrapped after the last successful action.
    #[serde(default)]
    pub terminal_q: f64,
}

impl Default for Hyperparameters {
    /// ε 0, α 0.9, γ 0.9, TTL 32, 75 episodes.
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            alpha: 0.9,
            gamma: 0.9,
            ttl: 32,
            episodes: 75,
            terminal_q: 0.0,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::Hyperparameter(m));
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad(format!("epsilon {} outside [0, 1]", self.epsilon));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha {} outside (0, 1]", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma {} outside [0, 1]", self.gamma));
        }
        if self.ttl == 0 {
            return bad("ttl must be positive".into());
        }
        if self.episodes == 0 {
            return Err(EngineError::ZeroEpisodes);
        }
        if !self.terminal_q.is_finite() {
            return bad(format!("terminal_q {} is not finite", self.terminal_q));
        }
        Ok(())
    }
}

/// Framework-wide settings used for the global table and whenever a request
/// does not bring its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Defaults {
    pub weights: QoSWeights,
    pub hyper: Hyperparameters,
}
