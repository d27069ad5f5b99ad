//! Simulated segment-routing data plane.
//!
//! A learning packet carries its whole segment list, so one episode costs a
//! single push from the controller plus one QoS report per hop (`n + 1`
//! messages) instead of a request/response pair per hop (`2n`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{NetError, NetworkGraph, NodeId, RoutePath, TrafficDemand};
use crate::rewards::HopQoSRecord;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossMode {
    Off,
    /// Each hop is lost with probability `1 − reliability`.
    Bernoulli,
}

#[derive(Debug, Clone)]
pub struct LossModel {
    mode: LossMode,
    rng: ChaCha8Rng,
}

impl LossModel {
    pub fn off() -> Self {
        Self {
            mode: LossMode::Off,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn bernoulli(seed: u64) -> Self {
        Self {
            mode: LossMode::Bernoulli,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn new(mode: LossMode, seed: u64) -> Self {
        match mode {
            LossMode::Off => Self::off(),
            LossMode::Bernoulli => Self::bernoulli(seed),
        }
    }

    pub fn mode(&self) -> LossMode {
        self.mode
    }

    fn sample_loss(&mut self, reliability: f64) -> bool {
        match self.mode {
            LossMode::Off => false,
            LossMode::Bernoulli => self.rng.gen::<f64>() >= reliability,
        }
    }
}

impl Default for LossModel {
    fn default() -> Self {
        Self::off()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionResult {
    /// Per-hop observations in path order; a lost hop is the last record.
    pub records: Vec<HopQoSRecord>,
    pub delivered: bool,
    pub messages_with_aggregation: usize,
    pub messages_without_aggregation: usize,
}

/// Reads the current state of link `src -> dst` and both end nodes.
pub fn snapshot_qos(graph: &NetworkGraph, src: NodeId, dst: NodeId, hop_index: usize) -> Result<HopQoSRecord, SimError> {
    let link = graph
        .link(src, dst)
        .ok_or_else(|| NetError::InvalidPath(format!("no link {src}->{dst}")))?;
    let sender = graph.node(src).ok_or(NetError::UnknownNode(src))?;
    let receiver = graph.node(dst).ok_or(NetError::UnknownNode(dst))?;
    Ok(HopQoSRecord {
        hop_index,
        src_id: src,
        dst_id: dst,
        sender_processing_rate: sender.processing_rate,
        receiver_processing_rate: receiver.processing_rate,
        receiver_incoming_traffic: receiver.incoming_traffic,
        link_max_bandwidth: link.max_bandwidth,
        link_used_bandwidth: link.used_bandwidth,
        link_reliability: link.reliability,
        has_lost: false,
    })
}

/// Sends one learning packet along `path` and collects per-hop QoS data.
///
/// The graph is only read; the demand's traffic is never placed here.
pub fn execute_path(
    graph: &NetworkGraph,
    path: &RoutePath,
    _demand: &TrafficDemand,
    loss: &mut LossModel,
) -> Result<ExecutionResult, SimError> {
    graph.validate_path(path)?;
    let mut records = Vec::with_capacity(path.hop_count());
    let mut delivered = true;
    for (i, (src, dst)) in path.hops().enumerate() {
        let mut record = snapshot_qos(graph, src, dst, i + 1)?;
        if loss.sample_loss(record.link_reliability) {
            record.has_lost = true;
            records.push(record);
            delivered = false;
            break;
        }
        records.push(record);
    }
    let n = records.len();
    Ok(ExecutionResult {
        records,
        delivered,
        messages_with_aggregation: n + 1,
        messages_without_aggregation: 2 * n,
    })
}

/// What the learner needs from the network: the topology view and a way to
/// send a learning packet.
pub trait DataPlane {
    fn graph(&self) -> &NetworkGraph;
    fn execute(&mut self, path: &RoutePath, demand: &TrafficDemand) -> Result<ExecutionResult, SimError>;
}

/// [`DataPlane`] backed by [`execute_path`] over a borrowed graph.
pub struct SimulatedDataPlane<'g> {
    graph: &'g NetworkGraph,
    loss: LossModel,
}

impl<'g> SimulatedDataPlane<'g> {
    pub fn new(graph: &'g NetworkGraph, loss: LossModel) -> Self {
        Self { graph, loss }
    }

    pub fn lossless(graph: &'g NetworkGraph) -> Self {
        Self::new(graph, LossModel::off())
    }

    pub fn into_loss_model(self) -> LossModel {
        self.loss
    }
}

impl DataPlane for SimulatedDataPlane<'_> {
    fn graph(&self) -> &NetworkGraph {
        self.graph
    }

    fn execute(&mut self, path: &RoutePath, demand: &TrafficDemand) -> Result<ExecutionResult, SimError> {
        execute_path(self.graph, path, demand, &mut self.loss)
    }
}
