//! Reinforcement-learning path computation for segment-routed SDN networks.
//!
//! | module | contents |
//! |--------|----------|
//! | [`net`] | directed network graph, traffic demands, topology JSON |
//! | [`rewards`] | per-factor QoS rewards and the local/global composites |
//! | [`engine`] | Q-tables, loop-free action selection, SARSA updates, route learning |
//! | [`sim`] | simulated data plane returning per-hop QoS observations |
//! | [`harness`] | experiment runner, baselines, built-in topologies, reports |

pub mod engine;
pub mod harness;
pub mod net;
pub mod rewards;
pub mod sim;

pub use engine::{Defaults, EngineError, Hyperparameters, Learner, QTable, RouteRequest};
pub use net::{NetError, NetworkGraph, NodeId, RoutePath, TrafficDemand};
pub use rewards::{HopQoSRecord, QoSWeights, RewardRecord};
pub use sim::{DataPlane, ExecutionResult, LossMode, LossModel, SimulatedDataPlane};
