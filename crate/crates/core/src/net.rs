//! Directed network graph, traffic demands and the JSON topology format.
//!
//! The graph is the single source of QoS state for the simulator: link
//! bandwidth and reliability, node processing rate and the aggregate
//! incoming traffic of every node. Node ids are dense `0..N`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum NetError {
    #[error("duplicate link {src}->{dst}")]
    DuplicateLink { src: NodeId, dst: NodeId },
    #[error("link {src}->{dst} references node {node}, but the graph has {nodes} nodes")]
    DanglingEndpoint {
        src: NodeId,
        dst: NodeId,
        node: NodeId,
        nodes: usize,
    },
    #[error("self loop on node {0}")]
    SelfLoop(NodeId),
    #[error("{what} must be {expect}, got {value}")]
    InvalidValue {
        what: String,
        expect: &'static str,
        value: f64,
    },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("demand source and destination are both {0}")]
    DemandLoop(NodeId),
    #[error("path is invalid: {0}")]
    InvalidPath(String),
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: NodeId,
    /// bits/s
    pub processing_rate: f64,
    /// bits/s, sum of used bandwidth over all inbound links.
    pub incoming_traffic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    pub src: NodeId,
    pub dst: NodeId,
    pub max_bandwidth: f64,
    pub used_bandwidth: f64,
    pub reliability: f64,
}

impl LinkState {
    pub fn utilization(&self) -> f64 {
        self.used_bandwidth / self.max_bandwidth
    }
}

/// Input row for [`NetworkGraph::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub src: NodeId,
    pub dst: NodeId,
    pub max_bandwidth: f64,
    pub used_bandwidth: f64,
    pub reliability: f64,
}

impl LinkSpec {
    pub fn new(src: NodeId, dst: NodeId, max_bandwidth: f64, used_bandwidth: f64, reliability: f64) -> Self {
        Self {
            src,
            dst,
            max_bandwidth,
            used_bandwidth,
            reliability,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    nodes: Vec<NodeState>,
    links: BTreeMap<(NodeId, NodeId), LinkState>,
    // sorted ascending so neighbor iteration is deterministic
    out: Vec<Vec<NodeId>>,
}

fn check(what: impl FnOnce() -> String, ok: bool, expect: &'static str, value: f64) -> Result<(), NetError> {
    if ok {
        Ok(())
    } else {
        Err(NetError::InvalidValue {
            what: what(),
            expect,
            value,
        })
    }
}

impl NetworkGraph {
    /// Builds a graph from per-node processing rates and a link list.
    ///
    /// Each node's incoming traffic starts as the sum of the configured used
    /// bandwidth of its inbound links.
    pub fn build(processing_rates: &[f64], links: &[LinkSpec]) -> Result<Self, NetError> {
        let n = processing_rates.len();
        let mut nodes = Vec::with_capacity(n);
        for (id, &rate) in processing_rates.iter().enumerate() {
            check(
                || format!("processing rate of node {id}"),
                rate.is_finite() && rate > 0.0,
                "a positive finite rate",
                rate,
            )?;
            nodes.push(NodeState {
                id,
                processing_rate: rate,
                incoming_traffic: 0.0,
            });
        }

        let mut map = BTreeMap::new();
        let mut out = vec![Vec::new(); n];
        for l in links {
            for node in [l.src, l.dst] {
                if node >= n {
                    return Err(NetError::DanglingEndpoint {
                        src: l.src,
                        dst: l.dst,
                        node,
                        nodes: n,
                    });
                }
            }
            if l.src == l.dst {
                return Err(NetError::SelfLoop(l.src));
            }
            let name = || format!("link {}->{}", l.src, l.dst);
            check(
                || format!("max bandwidth of {}", name()),
                l.max_bandwidth.is_finite() && l.max_bandwidth > 0.0,
                "a positive finite rate",
                l.max_bandwidth,
            )?;
            check(
                || format!("used bandwidth of {}", name()),
                l.used_bandwidth.is_finite() && l.used_bandwidth >= 0.0,
                "a non-negative finite rate",
                l.used_bandwidth,
            )?;
            check(
                || format!("reliability of {}", name()),
                (0.0..=1.0).contains(&l.reliability),
                "within [0, 1]",
                l.reliability,
            )?;
            if map.contains_key(&(l.src, l.dst)) {
                return Err(NetError::DuplicateLink { src: l.src, dst: l.dst });
            }
            map.insert(
                (l.src, l.dst),
                LinkState {
                    src: l.src,
                    dst: l.dst,
                    max_bandwidth: l.max_bandwidth,
                    used_bandwidth: l.used_bandwidth,
                    reliability: l.reliability,
                },
            );
            out[l.src].push(l.dst);
        }
        for adj in &mut out {
            adj.sort_unstable();
        }
        for link in map.values() {
            nodes[link.dst].incoming_traffic += link.used_bandwidth;
        }

        Ok(Self { nodes, links: map, out })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeState> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn link(&self, src: NodeId, dst: NodeId) -> Option<&LinkState> {
        self.links.get(&(src, dst))
    }

    pub fn has_link(&self, src: NodeId, dst: NodeId) -> bool {
        self.links.contains_key(&(src, dst))
    }

    /// Links in ascending `(src, dst)` order.
    pub fn links(&self) -> impl Iterator<Item = &LinkState> {
        self.links.values()
    }

    /// Out-neighbors of `id` in ascending id order.
    pub fn out_neighbors(&self, id: NodeId) -> &[NodeId] {
        self.out.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn max_link_utilization(&self) -> f64 {
        self.links.values().map(LinkState::utilization).fold(0.0, f64::max)
    }

    /// Checks that `path` is a simple chain of existing links.
    pub fn validate_path(&self, path: &RoutePath) -> Result<(), NetError> {
        let nodes = path.nodes();
        let Some(&first) = nodes.first() else {
            return Err(NetError::InvalidPath("empty node list".into()));
        };
        if first >= self.node_count() {
            return Err(NetError::UnknownNode(first));
        }
        let mut seen = vec![false; self.node_count()];
        seen[first] = true;
        for (a, b) in path.hops() {
            if b >= self.node_count() {
                return Err(NetError::UnknownNode(b));
            }
            if !self.has_link(a, b) {
                return Err(NetError::InvalidPath(format!("no link {a}->{b}")));
            }
            if seen[b] {
                return Err(NetError::InvalidPath(format!("node {b} visited twice")));
            }
            seen[b] = true;
        }
        Ok(())
    }

    /// Adds the demand's traffic to every link of `path` and to the incoming
    /// traffic of every path node after the source.
    pub fn place_traffic(&mut self, path: &RoutePath, demand: &TrafficDemand) -> Result<(), NetError> {
        self.validate_path(path)?;
        if !path.reached_destination() || path.source() != demand.src || path.last() != demand.dst {
            return Err(NetError::InvalidPath(format!(
                "path {path} does not carry demand {}->{}",
                demand.src, demand.dst
            )));
        }
        for (a, b) in path.hops() {
            if let Some(link) = self.links.get_mut(&(a, b)) {
                link.used_bandwidth += demand.traffic;
            }
            self.nodes[b].incoming_traffic += demand.traffic;
        }
        Ok(())
    }

    fn to_document(&self) -> TopologyDocument {
        TopologyDocument {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDocument {
                    id: n.id,
                    processing_rate_bps: n.processing_rate,
                })
                .collect(),
            links: self
                .links
                .values()
                .map(|l| LinkDocument {
                    src: l.src,
                    dst: l.dst,
                    max_bandwidth_bps: l.max_bandwidth,
                    used_bandwidth_bps: l.used_bandwidth,
                    reliability: l.reliability,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("topology serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, NetError> {
        load_topology(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficDemand {
    pub src: NodeId,
    pub dst: NodeId,
    /// bits/s
    #[serde(rename = "traffic_bps")]
    pub traffic: f64,
}

impl TrafficDemand {
    pub fn new(src: NodeId, dst: NodeId, traffic: f64) -> Result<Self, NetError> {
        let d = Self { src, dst, traffic };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.src == self.dst {
            return Err(NetError::DemandLoop(self.src));
        }
        check(
            || format!("traffic of demand {}->{}", self.src, self.dst),
            self.traffic.is_finite() && self.traffic > 0.0,
            "a positive finite rate",
            self.traffic,
        )
    }

    pub fn validate_in(&self, graph: &NetworkGraph) -> Result<(), NetError> {
        self.validate()?;
        for node in [self.src, self.dst] {
            if node >= graph.node_count() {
                return Err(NetError::UnknownNode(node));
            }
        }
        Ok(())
    }
}

/// An ordered node list; hops are the consecutive pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutePath {
    nodes: Vec<NodeId>,
    reached_destination: bool,
}

impl RoutePath {
    pub fn start(src: NodeId) -> Self {
        Self {
            nodes: vec![src],
            reached_destination: false,
        }
    }

    pub fn new(nodes: Vec<NodeId>, reached_destination: bool) -> Self {
        assert!(!nodes.is_empty(), "a path holds at least its source");
        Self {
            nodes,
            reached_destination,
        }
    }

    pub fn push(&mut self, next: NodeId) {
        self.nodes.push(next);
    }

    pub fn set_reached(&mut self, reached: bool) {
        self.reached_destination = reached;
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().expect("non-empty path")
    }

    pub fn hop_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn reached_destination(&self) -> bool {
        self.reached_destination
    }

    pub fn hops(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn contains_hop(&self, src: NodeId, dst: NodeId) -> bool {
        self.hops().any(|h| h == (src, dst))
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.nodes.len());
        self.nodes.iter().all(|n| seen.insert(*n))
    }
}

impl fmt::Display for RoutePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("->")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDocument {
    nodes: Vec<NodeDocument>,
    links: Vec<LinkDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDocument {
    id: NodeId,
    processing_rate_bps: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDocument {
    src: NodeId,
    dst: NodeId,
    max_bandwidth_bps: f64,
    used_bandwidth_bps: f64,
    reliability: f64,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> NetError {
    NetError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses a topology document.
///
/// ```json
/// {"nodes":[{"id":0,"processing_rate_bps":1.0e8}],
///  "links":[{"src":0,"dst":1,"max_bandwidth_bps":1.0e7,"used_bandwidth_bps":1.0e6,"reliability":0.95}]}
/// ```
pub fn load_topology(text: &str) -> Result<NetworkGraph, NetError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: TopologyDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;

    let n = doc.nodes.len();
    let mut rates = vec![f64::NAN; n];
    for (i, node) in doc.nodes.iter().enumerate() {
        if node.id >= n {
            return Err(schema(
                format!("nodes[{i}].id"),
                format!("node ids must be dense 0..{n}, got {}", node.id),
            ));
        }
        if !rates[node.id].is_nan() {
            return Err(schema(format!("nodes[{i}].id"), format!("duplicate node id {}", node.id)));
        }
        if !(node.processing_rate_bps.is_finite() && node.processing_rate_bps > 0.0) {
            return Err(schema(
                format!("nodes[{i}].processing_rate_bps"),
                format!("node {} needs a positive rate, got {}", node.id, node.processing_rate_bps),
            ));
        }
        rates[node.id] = node.processing_rate_bps;
    }

    let mut links = Vec::with_capacity(doc.links.len());
    for (i, l) in doc.links.iter().enumerate() {
        let at = |field: &str| format!("links[{i}].{field}");
        let name = format!("link {}->{}", l.src, l.dst);
        if l.src >= n || l.dst >= n {
            let field = if l.src >= n { "src" } else { "dst" };
            return Err(schema(at(field), format!("{name} references a node outside 0..{n}")));
        }
        if !(0.0..=1.0).contains(&l.reliability) {
            return Err(schema(
                at("reliability"),
                format!("{name} reliability {} is outside [0, 1]", l.reliability),
            ));
        }
        if !(l.max_bandwidth_bps.is_finite() && l.max_bandwidth_bps > 0.0) {
            return Err(schema(
                at("max_bandwidth_bps"),
                format!("{name} needs a positive max bandwidth, got {}", l.max_bandwidth_bps),
            ));
        }
        if !(l.used_bandwidth_bps.is_finite() && l.used_bandwidth_bps >= 0.0) {
            return Err(schema(
                at("used_bandwidth_bps"),
                format!("{name} needs a non-negative used bandwidth, got {}", l.used_bandwidth_bps),
            ));
        }
        links.push(LinkSpec::new(
            l.src,
            l.dst,
            l.max_bandwidth_bps,
            l.used_bandwidth_bps,
            l.reliability,
        ));
    }
    NetworkGraph::build(&rates, &links)
}

pub fn load_topology_file(path: &Path) -> Result<NetworkGraph, NetError> {
    let text = std::fs::read_to_string(path).map_err(|e| NetError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_topology(&text)
}

pub fn save_topology(graph: &NetworkGraph) -> String {
    graph.to_json()
}

/// Parses a demand list: `[{"src":0,"dst":26,"traffic_bps":1.0e5}]`.
pub fn load_demands(text: &str) -> Result<Vec<TrafficDemand>, NetError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let demands: Vec<TrafficDemand> = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;
    for (i, d) in demands.iter().enumerate() {
        d.validate().map_err(|e| schema(format!("[{i}]"), e.to_string()))?;
    }
    Ok(demands)
}
