use rand::seq::SliceRandom;
use rand::Rng;

use super::table::{best_of, QTable};
use super::{EngineError, Hyperparameters};
use crate::net::{NetworkGraph, RoutePath, TrafficDemand};

/// Selects a whole episode's actions up front.
///
/// Starting from the demand's source (which counts as visited), each step
/// picks among the current node's unvisited out-neighbors: uniformly at
/// random with probability ε, otherwise the highest Q-value with ties going
/// to the lowest node id. Stops at the destination, at a dead end, or once
/// `ttl` hops are used. The result is always a simple path.
pub fn find_temp_path<R: Rng + ?Sized>(
    demand: &TrafficDemand,
    table: &QTable,
    hyper: &Hyperparameters,
    graph: &NetworkGraph,
    rng: &mut R,
) -> Result<RoutePath, EngineError> {
    demand.validate_in(graph)?;
    if table.size() != graph.node_count() {
        return Err(EngineError::DimensionMismatch {
            expected: graph.node_count(),
            found: table.size(),
        });
    }

    let mut visited = vec![false; graph.node_count()];
    let mut path = RoutePath::start(demand.src);
    let mut current = demand.src;
    visited[current] = true;
    let mut remaining = hyper.ttl;
    let mut candidates = Vec::new();

    while remaining > 0 && current != demand.dst {
        candidates.clear();
        candidates.extend(
            graph
                .out_neighbors(current)
                .iter()
                .copied()
                .filter(|&n| !visited[n] && !table.is_absent(current, n)),
        );
        if candidates.is_empty() {
            break;
        }
        let next = if hyper.epsilon > 0.0 && rng.gen::<f64>() < hyper.epsilon {
            *candidates.choose(rng).expect("non-empty")
        } else {
            best_of(table, current, candidates.iter().copied()).expect("non-empty")
        };
        path.push(next);
        visited[next] = true;
        current = next;
        remaining -= 1;
    }
    path.set_reached(current == demand.dst);
    Ok(path)
}

/// Greedy (ε = 0) walk over the learned table.
pub fn find_final_path(
    demand: &TrafficDemand,
    table: &QTable,
    hyper: &Hyperparameters,
    graph: &NetworkGraph,
) -> Result<RoutePath, EngineError> {
    let greedy = Hyperparameters { epsilon: 0.0, ..*hyper };
    // ε = 0 never draws from the generator
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    find_temp_path(demand, table, &greedy, graph, &mut rng)
}
