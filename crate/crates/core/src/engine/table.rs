use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::net::{NetworkGraph, NodeId};

/// Dense state × action table. Row `i`, column `j` is the value of sending
/// the packet held at node `i` to node `j`; `None` marks a missing link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    size: usize,
    values: Vec<Option<f64>>,
}

impl QTable {
    /// Zero for every link of `graph`, absent elsewhere.
    pub fn zeroed(graph: &NetworkGraph) -> Self {
        let size = graph.node_count();
        let mut values = vec![None; size * size];
        for link in graph.links() {
            values[link.src * size + link.dst] = Some(0.0);
        }
        Self { size, values }
    }

    /// Builds a table from explicit rows; `None` entries are absent links.
    pub fn from_rows(rows: &[Vec<Option<f64>>]) -> Result<Self, EngineError> {
        let size = rows.len();
        let mut values = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(EngineError::DimensionMismatch {
                    expected: size,
                    found: row.len(),
                });
            }
            for v in row {
                if let Some(v) = v {
                    if !v.is_finite() {
                        return Err(EngineError::NonFinite(*v));
                    }
                }
                values.push(*v);
            }
        }
        Ok(Self { size, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, state: NodeId, action: NodeId) -> Option<f64> {
        if state >= self.size || action >= self.size {
            return None;
        }
        self.values[state * self.size + action]
    }

    pub fn is_absent(&self, state: NodeId, action: NodeId) -> bool {
        self.get(state, action).is_none()
    }

    /// Overwrites a present entry. Absent entries are never written.
    pub fn set(&mut self, state: NodeId, action: NodeId, value: f64) -> Result<(), EngineError> {
        if !value.is_finite() {
            return Err(EngineError::NonFinite(value));
        }
        let slot = self.slot(state, action)?;
        *slot = Some(value);
        Ok(())
    }

    fn slot(&mut self, state: NodeId, action: NodeId) -> Result<&mut Option<f64>, EngineError> {
        if state >= self.size || action >= self.size {
            return Err(EngineError::AbsentEntry { state, action });
        }
        let slot = &mut self.values[state * self.size + action];
        if slot.is_none() {
            return Err(EngineError::AbsentEntry { state, action });
        }
        Ok(slot)
    }

    pub fn row(&self, state: NodeId) -> &[Option<f64>] {
        &self.values[state * self.size..(state + 1) * self.size]
    }

    pub fn rows(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.size).map(|s| self.row(s).to_vec()).collect()
    }

    /// Highest-valued present action in `state`, lowest id on ties.
    pub fn best_action(&self, state: NodeId) -> Option<NodeId> {
        best_of(self, state, 0..self.size)
    }

    /// True when the absent pattern is exactly the graph's missing links.
    pub fn matches_graph(&self, graph: &NetworkGraph) -> bool {
        self.size == graph.node_count()
            && (0..self.size).all(|s| (0..self.size).all(|a| self.is_absent(s, a) != graph.has_link(s, a)))
    }
}

pub(crate) fn best_of(table: &QTable, state: NodeId, candidates: impl IntoIterator<Item = NodeId>) -> Option<NodeId> {
    let mut best: Option<(NodeId, f64)> = None;
    for a in candidates {
        if let Some(v) = table.get(state, a) {
            match best {
                Some((_, bv)) if v <= bv => {}
                _ => best = Some((a, v)),
            }
        }
    }
    best.map(|(a, _)| a)
}

/// Starting table for one demand: a deep copy of the global table, or a
/// fresh zero table.
pub fn init_local_table(graph: &NetworkGraph, global: &QTable, use_global: bool) -> Result<QTable, EngineError> {
    if !use_global {
        return Ok(QTable::zeroed(graph));
    }
    if global.size() != graph.node_count() {
        return Err(EngineError::DimensionMismatch {
            expected: graph.node_count(),
            found: global.size(),
        });
    }
    if !global.matches_graph(graph) {
        return Err(EngineError::AdjacencyMismatch);
    }
    Ok(global.clone())
}
