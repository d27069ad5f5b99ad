use rand::Rng;
use serde::{Deserialize, Serialize};

use super::select::{find_final_path, find_temp_path};
use super::table::{init_local_table, QTable};
use super::update::update_table;
use super::{Defaults, EngineError, Hyperparameters};
use crate::net::{NetworkGraph, RoutePath, TrafficDemand};
use crate::rewards::{global_rewards_for_path, local_rewards_for_path, QoSWeights, RewardRecord};
use crate::sim::DataPlane;

/// A routing request. Missing weights or hyperparameters fall back to the
/// framework defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteRequest {
    pub demand: TrafficDemand,
    pub use_global: bool,
    pub weights: Option<QoSWeights>,
    pub hyper: Option<Hyperparameters>,
}

impl RouteRequest {
    pub fn new(demand: TrafficDemand) -> Self {
        Self {
            demand,
            use_global: false,
            weights: None,
            hyper: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    /// 1-based.
    pub episode: usize,
    pub temp_path: RoutePath,
    pub path_length: usize,
    pub reached: bool,
    pub delivered: bool,
    pub rewards: Vec<RewardRecord>,
    pub messages_with_aggregation: usize,
    pub messages_without_aggregation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningRun {
    pub final_path: RoutePath,
    pub traces: Vec<EpisodeTrace>,
    pub local_table: QTable,
}

/// Learns a path for one demand.
///
/// The local table drives selection and is updated with the request's
/// weights and hyperparameters. The global table is updated in place with
/// the framework defaults and carries what was learned to later demands.
pub fn find_route<D, R>(
    request: &RouteRequest,
    defaults: &Defaults,
    env: &mut D,
    global: &mut QTable,
    rng: &mut R,
) -> Result<LearningRun, EngineError>
where
    D: DataPlane + ?Sized,
    R: Rng + ?Sized,
{
    let demand = &request.demand;
    let weights = request.weights.unwrap_or(defaults.weights);
    let hyper = request.hyper.unwrap_or(defaults.hyper);
    hyper.validate()?;
    defaults.hyper.validate()?;

    let graph: &NetworkGraph = env.graph();
    demand.validate_in(graph)?;
    if global.size() != graph.node_count() {
        return Err(EngineError::DimensionMismatch {
            expected: graph.node_count(),
            found: global.size(),
        });
    }
    if graph.out_neighbors(demand.src).is_empty() {
        return Err(EngineError::UnroutableSource(demand.src));
    }

    let mut local = init_local_table(graph, global, request.use_global)?;
    let mut traces = Vec::with_capacity(hyper.episodes);
    for episode in 1..=hyper.episodes {
        let temp_path = find_temp_path(demand, &local, &hyper, env.graph(), rng)?;
        let result = env.execute(&temp_path, demand)?;
        let local_rewards = local_rewards_for_path(&result.records, &weights, demand)?;
        let global_rewards = global_rewards_for_path(&result.records, &defaults.weights)?;
        update_table(&mut local, &local_rewards, &hyper)?;
        update_table(global, &global_rewards, &defaults.hyper)?;
        traces.push(EpisodeTrace {
            episode,
            path_length: temp_path.hop_count(),
            reached: temp_path.reached_destination(),
            temp_path,
            delivered: result.delivered,
            rewards: local_rewards,
            messages_with_aggregation: result.messages_with_aggregation,
            messages_without_aggregation: result.messages_without_aggregation,
        });
    }

    let final_path = find_final_path(demand, &local, &hyper, env.graph())?;
    Ok(LearningRun {
        final_path,
        traces,
        local_table: local,
    })
}

/// Owns the framework defaults and the global table across requests.
#[derive(Debug, Clone)]
pub struct Learner {
    defaults: Defaults,
    global: QTable,
}

impl Learner {
    pub fn new(graph: &NetworkGraph, defaults: Defaults) -> Self {
        Self {
            defaults,
            global: QTable::zeroed(graph),
        }
    }

    pub fn defaults(&self) -> &Defaults {
        &self.defaults
    }

    pub fn global_table(&self) -> &QTable {
        &self.global
    }

    pub fn find_route<D, R>(&mut self, request: &RouteRequest, env: &mut D, rng: &mut R) -> Result<LearningRun, EngineError>
    where
        D: DataPlane + ?Sized,
        R: Rng + ?Sized,
    {
        find_route(request, &self.defaults, env, &mut self.global, rng)
    }
}
