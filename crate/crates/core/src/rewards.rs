//! QoS reward arithmetic.
//!
//! Five per-factor rewards (hop count, transmission rate, reliability,
//! traffic intensity, link utilization), each bounded above by 1, combine
//! into a local reward (user weights, estimated load) and a global reward
//! (framework weights, current load). Subtracting the weight-derived
//! constants keeps every successful local reward at or below -0.1 and every
//! global reward at or below 0.

use std::f64::consts::FRAC_2_PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{NodeId, TrafficDemand};

const BITS_PER_MEGABIT: f64 = 1.0e6;

#[derive(Debug, Error, PartialEq)]
pub enum RewardError {
    #[error("hop index must be at least 1, got {0}")]
    HopIndex(usize),
    #[error("{0} must be non-negative, got {1}")]
    Negative(&'static str, f64),
    #[error("reliability must be within [0, 1], got {0}")]
    Reliability(f64),
    #[error("receiver processing rate must be positive, got {0}")]
    ZeroProcessingRate(f64),
    #[error("link max bandwidth must be positive, got {0}")]
    ZeroMaxBandwidth(f64),
    #[error("weight {0} must be non-negative and finite, got {1}")]
    Weight(&'static str, f64),
    #[error("no hop records to reward")]
    Empty,
}

fn non_negative(what: &'static str, v: f64) -> Result<f64, RewardError> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(RewardError::Negative(what, v))
    }
}

/// `1 / hop_index`.
pub fn reward_hop(hop_index: usize) -> Result<f64, RewardError> {
    if hop_index == 0 {
        return Err(RewardError::HopIndex(hop_index));
    }
    Ok(1.0 / hop_index as f64)
}

/// `(2/π)·arctan(rate)` with the sending node's rate expressed in Mb/s.
pub fn reward_transmission(sender_rate_mbps: f64) -> Result<f64, RewardError> {
    let rate = non_negative("sender rate", sender_rate_mbps)?;
    Ok(FRAC_2_PI * rate.atan())
}

pub fn reward_reliability(reliability: f64) -> Result<f64, RewardError> {
    if (0.0..=1.0).contains(&reliability) {
        Ok(reliability)
    } else {
        Err(RewardError::Reliability(reliability))
    }
}

/// `1 − (incoming + extra) / rate` for the receiving node. `extra = 0` gives
/// the current form, `extra = demand traffic` the estimated one.
pub fn reward_intensity(receiver_incoming: f64, receiver_rate: f64, extra: f64) -> Result<f64, RewardError> {
    if receiver_rate.is_nan() || receiver_rate <= 0.0 {
        return Err(RewardError::ZeroProcessingRate(receiver_rate));
    }
    let incoming = non_negative("receiver incoming traffic", receiver_incoming)?;
    let extra = non_negative("extra traffic", extra)?;
    Ok((receiver_rate - incoming - extra) / receiver_rate)
}

/// `1 − (used + extra) / max`. Negative when the link is over-subscribed.
pub fn reward_utilization(used: f64, max: f64, extra: f64) -> Result<f64, RewardError> {
    if max.is_nan() || max <= 0.0 {
        return Err(RewardError::ZeroMaxBandwidth(max));
    }
    let used = non_negative("used bandwidth", used)?;
    let extra = non_negative("extra traffic", extra)?;
    Ok((max - used - extra) / max)
}

/// Per-factor reward weights plus the two constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct QoSWeights {
    hop: f64,
    transmission: f64,
    reliability: f64,
    intensity: f64,
    utilization: f64,
    l_constant: f64,
    g_constant: f64,
}

#[derive(Serialize, Deserialize)]
struct RawWeights {
    wc: f64,
    wt: f64,
    wr: f64,
    wi: f64,
    wu: f64,
}

impl TryFrom<RawWeights> for QoSWeights {
    type Error = RewardError;

    fn try_from(r: RawWeights) -> Result<Self, Self::Error> {
        QoSWeights::new(r.wc, r.wt, r.wr, r.wi, r.wu)
    }
}

impl From<QoSWeights> for RawWeights {
    fn from(w: QoSWeights) -> Self {
        RawWeights {
            wc: w.hop,
            wt: w.transmission,
            wr: w.reliability,
            wi: w.intensity,
            wu: w.utilization,
        }
    }
}

impl QoSWeights {
    /// Weights in the order hop count, transmission rate, reliability,
    /// traffic intensity, link utilization.
    pub fn new(wc: f64, wt: f64, wr: f64, wi: f64, wu: f64) -> Result<Self, RewardError> {
        for (name, w) in [("wc", wc), ("wt", wt), ("wr", wr), ("wi", wi), ("wu", wu)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(RewardError::Weight(name, w));
            }
        }
        Ok(Self {
            hop: wc,
            transmission: wt,
            reliability: wr,
            intensity: wi,
            utilization: wu,
            l_constant: wc + wt + wr + wi + wu + 0.1,
            g_constant: wr + wi + wu,
        })
    }

    /// All five weights set to 1.
    pub fn uniform() -> Self {
        Self::new(1.0, 1.0, 1.0, 1.0, 1.0).expect("valid weights")
    }

    pub fn wc(&self) -> f64 {
        self.hop
    }
    pub fn wt(&self) -> f64 {
        self.transmission
    }
    pub fn wr(&self) -> f64 {
        self.reliability
    }
    pub fn wi(&self) -> f64 {
        self.intensity
    }
    pub fn wu(&self) -> f64 {
        self.utilization
    }

    pub fn l_constant(&self) -> f64 {
        self.l_constant
    }

    pub fn g_constant(&self) -> f64 {
        self.g_constant
    }
}

impl Default for QoSWeights {
    fn default() -> Self {
        Self::uniform()
    }
}

/// What the data plane observed for one hop `src_id -> dst_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopQoSRecord {
    /// 1-based position of the hop in the performed action list.
    pub hop_index: usize,
    pub src_id: NodeId,
    pub dst_id: NodeId,
    pub sender_processing_rate: f64,
    pub receiver_processing_rate: f64,
    pub receiver_incoming_traffic: f64,
    pub link_max_bandwidth: f64,
    pub link_used_bandwidth: f64,
    pub link_reliability: f64,
    pub has_lost: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardRecord {
    pub src_id: NodeId,
    pub dst_id: NodeId,
    pub action_success: bool,
    pub value: f64,
}

pub fn local_reward(record: &HopQoSRecord, weights: &QoSWeights, demand_traffic: f64) -> Result<f64, RewardError> {
    let hop = reward_hop(record.hop_index)?;
    let transmission = reward_transmission(record.sender_processing_rate / BITS_PER_MEGABIT)?;
    let reliability = reward_reliability(record.link_reliability)?;
    let intensity = reward_intensity(
        record.receiver_incoming_traffic,
        record.receiver_processing_rate,
        demand_traffic,
    )?;
    let utilization = reward_utilization(record.link_used_bandwidth, record.link_max_bandwidth, demand_traffic)?;
    Ok(weights.hop * hop
        + weights.transmission * transmission
        + weights.reliability * reliability
        + weights.intensity * intensity
        + weights.utilization * utilization
        - weights.l_constant)
}

pub fn global_reward(record: &HopQoSRecord, weights: &QoSWeights) -> Result<f64, RewardError> {
    let reliability = reward_reliability(record.link_reliability)?;
    let intensity = reward_intensity(record.receiver_incoming_traffic, record.receiver_processing_rate, 0.0)?;
    let utilization = reward_utilization(record.link_used_bandwidth, record.link_max_bandwidth, 0.0)?;
    Ok(weights.reliability * reliability + weights.intensity * intensity + weights.utilization * utilization
        - weights.g_constant)
}

/// Local rewards for an executed path. The last hop fails when the packet
/// was lost or did not end at the demand's destination.
pub fn local_rewards_for_path(
    records: &[HopQoSRecord],
    weights: &QoSWeights,
    demand: &TrafficDemand,
) -> Result<Vec<RewardRecord>, RewardError> {
    rewards_for_path(
        records,
        |last| last.has_lost || last.dst_id != demand.dst,
        -weights.l_constant,
        |r| local_reward(r, weights, demand.traffic),
    )
}

/// Global rewards for an executed path. Only packet loss fails the last hop.
pub fn global_rewards_for_path(records: &[HopQoSRecord], weights: &QoSWeights) -> Result<Vec<RewardRecord>, RewardError> {
    rewards_for_path(records, |last| last.has_lost, -weights.g_constant, |r| global_reward(r, weights))
}

fn rewards_for_path(
    records: &[HopQoSRecord],
    failed: impl Fn(&HopQoSRecord) -> bool,
    penalty: f64,
    value: impl Fn(&HopQoSRecord) -> Result<f64, RewardError>,
) -> Result<Vec<RewardRecord>, RewardError> {
    let (last, body) = records.split_last().ok_or(RewardError::Empty)?;
    let mut out = Vec::with_capacity(records.len());
    for r in body {
        out.push(RewardRecord {
            src_id: r.src_id,
            dst_id: r.dst_id,
            action_success: true,
            value: value(r)?,
        });
    }
    let (action_success, value) = if failed(last) {
        (false, penalty)
    } else {
        (true, value(last)?)
    };
    out.push(RewardRecord {
        src_id: last.src_id,
        dst_id: last.dst_id,
        action_success,
        value,
    });
    Ok(out)
}
