use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::net::{load_demands, load_topology, NetError, NetworkGraph, TrafficDemand};

/// Topologies shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    T1,
    T2,
    T3,
    T4,
    T7,
    T8,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [Self::T1, Self::T2, Self::T3, Self::T4, Self::T7, Self::T8];

    pub fn name(self) -> &'static str {
        match self {
            Self::T1 => "t1",
            Self::T2 => "t2",
            Self::T3 => "t3",
            Self::T4 => "t4",
            Self::T7 => "t7",
            Self::T8 => "t8",
        }
    }

    pub fn topology_json(self) -> &'static str {
        match self {
            Self::T1 => include_str!("../../data/topologies/t1.json"),
            Self::T2 => include_str!("../../data/topologies/t2.json"),
            Self::T3 => include_str!("../../data/topologies/t3.json"),
            Self::T4 => include_str!("../../data/topologies/t4.json"),
            Self::T7 => include_str!("../../data/topologies/t7.json"),
            Self::T8 => include_str!("../../data/topologies/t8.json"),
        }
    }

    /// The shipped demand sequence, if any.
    pub fn demands_json(self) -> Option<&'static str> {
        match self {
            Self::T7 => Some(include_str!("../../data/demands/t7.json")),
            Self::T8 => Some(include_str!("../../data/demands/t8.json")),
            _ => None,
        }
    }

    pub fn graph(self) -> Result<NetworkGraph, NetError> {
        load_topology(self.topology_json())
    }

    pub fn demands(self) -> Result<Vec<TrafficDemand>, NetError> {
        self.demands_json().map_or(Ok(Vec::new()), load_demands)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown built-in topology {s:?}"))
    }
}
