use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::net::{NetError, NetworkGraph, RoutePath, TrafficDemand};

/// Breadth-first shortest path by hop count. Neighbors are expanded in
/// ascending id order, so ties go to the lowest ids. `None` when the
/// destination is unreachable.
pub fn baseline_min_hop(graph: &NetworkGraph, demand: &TrafficDemand) -> Option<RoutePath> {
    let n = graph.node_count();
    if demand.src >= n || demand.dst >= n {
        return None;
    }
    let mut parent = vec![usize::MAX; n];
    parent[demand.src] = demand.src;
    let mut queue = VecDeque::from([demand.src]);
    while let Some(u) = queue.pop_front() {
        if u == demand.dst {
            break;
        }
        for &v in graph.out_neighbors(u) {
            if parent[v] == usize::MAX {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    if parent[demand.dst] == usize::MAX {
        return None;
    }
    let mut nodes = vec![demand.dst];
    let mut at = demand.dst;
    while at != demand.src {
        at = parent[at];
        nodes.push(at);
    }
    nodes.reverse();
    Some(RoutePath::new(nodes, true))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineDemand {
    pub demand: TrafficDemand,
    pub path: Option<RoutePath>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub demands: Vec<BaselineDemand>,
    pub links: Vec<super::LinkReport>,
    pub max_link_utilization: f64,
}

/// Places every demand on its min-hop path, in order.
pub fn run_baseline(mut graph: NetworkGraph, demands: &[TrafficDemand]) -> Result<BaselineReport, NetError> {
    let mut out = Vec::with_capacity(demands.len());
    for demand in demands {
        demand.validate_in(&graph)?;
        let path = baseline_min_hop(&graph, demand);
        if let Some(p) = &path {
            graph.place_traffic(p, demand)?;
        }
        out.push(BaselineDemand { demand: *demand, path });
    }
    Ok(BaselineReport {
        demands: out,
        links: super::link_reports(&graph),
        max_link_utilization: graph.max_link_utilization(),
    })
}
