//! Experiment runner.
//!
//! A run learns a path for each demand in order and places the demand's
//! traffic on it before the next demand starts, so later demands see the
//! load of earlier ones.

mod baseline;
mod builtin;
mod report;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use baseline::{baseline_min_hop, run_baseline, BaselineDemand, BaselineReport};
pub use builtin::Builtin;
pub use report::{emit_baseline, emit_gamma_study, emit_reports};

use crate::engine::{detect_convergence, find_route, Defaults, EngineError, Hyperparameters, QTable, RouteRequest};
use crate::net::{load_topology_file, NetError, NetworkGraph, NodeId, RoutePath, TrafficDemand};
use crate::rewards::QoSWeights;
use crate::sim::{LossMode, LossModel, SimulatedDataPlane};

pub const DEFAULT_SEED: u64 = 20_190_613;

/// Stated in every report.
pub const CONVERGENCE_RULE: &str = "first episode from which every temp path is the same destination-reaching path \
     through the last episode; a one-episode suffix of a multi-episode run does not count";

const LOSS_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("demand {index}: {source}")]
    Demand { index: usize, source: NetError },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologySource {
    Builtin(Builtin),
    File(PathBuf),
}

impl TopologySource {
    pub fn load(&self) -> Result<NetworkGraph, NetError> {
        match self {
            Self::Builtin(b) => b.graph(),
            Self::File(p) => load_topology_file(p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Builtin(b) => b.name().to_string(),
            Self::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySource,
    /// Placed in this order.
    pub demands: Vec<TrafficDemand>,
    /// Local-reward weights.
    pub weights: QoSWeights,
    /// Local-table hyperparameters.
    pub hyper: Hyperparameters,
    /// Initialize each local table from the global table.
    pub use_global: bool,
    /// Discount used for the global table; the default hyperparameters'
    /// γ otherwise.
    pub global_gamma: Option<f64>,
    pub seed: u64,
    pub loss: LossMode,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(topology: TopologySource, demands: Vec<TrafficDemand>) -> Self {
        Self {
            topology,
            demands,
            weights: QoSWeights::default(),
            hyper: Hyperparameters::default(),
            use_global: false,
            global_gamma: None,
            seed: DEFAULT_SEED,
            loss: LossMode::Off,
            out_dir: None,
        }
    }

    /// A built-in topology with its shipped demand sequence.
    pub fn builtin(b: Builtin) -> Result<Self, NetError> {
        Ok(Self::new(TopologySource::Builtin(b), b.demands()?))
    }

    pub fn defaults(&self) -> Result<Defaults, ExperimentError> {
        let mut defaults = Defaults::default();
        if let Some(g) = self.global_gamma {
            defaults.hyper.gamma = g;
        }
        defaults.hyper.validate()?;
        Ok(defaults)
    }

    pub fn validate(&self, graph: &NetworkGraph) -> Result<(), ExperimentError> {
        self.hyper.validate()?;
        self.defaults()?;
        for (index, d) in self.demands.iter().enumerate() {
            d.validate_in(graph)
                .map_err(|source| ExperimentError::Demand { index, source })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DemandOutcome {
    Placed { final_path: RoutePath },
    Unroutable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandReport {
    pub index: usize,
    pub demand: TrafficDemand,
    pub outcome: DemandOutcome,
    pub convergence_episode: Option<usize>,
    /// Hop count of each episode's temp path.
    pub temp_path_lengths: Vec<usize>,
    pub messages_with_aggregation: usize,
    pub messages_without_aggregation: usize,
}

impl DemandReport {
    pub fn final_path(&self) -> Option<&RoutePath> {
        match &self.outcome {
            DemandOutcome::Placed { final_path } => Some(final_path),
            DemandOutcome::Unroutable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub src: NodeId,
    pub dst: NodeId,
    pub max_bandwidth_bps: f64,
    pub used_bandwidth_bps: f64,
    pub utilization: f64,
}

pub fn link_reports(graph: &NetworkGraph) -> Vec<LinkReport> {
    graph
        .links()
        .map(|l| LinkReport {
            src: l.src,
            dst: l.dst,
            max_bandwidth_bps: l.max_bandwidth,
            used_bandwidth_bps: l.used_bandwidth,
            utilization: l.utilization(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub topology: String,
    pub seed: u64,
    pub weights: QoSWeights,
    pub hyper: Hyperparameters,
    pub use_global: bool,
    pub global_gamma: f64,
    pub loss: LossMode,
    pub convergence_rule: String,
    pub demands: Vec<DemandReport>,
    /// Sum of convergence episodes; a demand that never converged counts
    /// the full episode budget.
    pub total_convergence_episodes: usize,
    pub unconverged_demands: usize,
    pub links: Vec<LinkReport>,
    pub max_link_utilization: f64,
    pub messages_with_aggregation: usize,
    pub messages_without_aggregation: usize,
}

/// Loads the configured topology and runs the demand sequence on it.
pub fn run_sequence(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let graph = config.topology.load()?;
    run_sequence_on(graph, config)
}

/// Runs the demand sequence on an explicit starting graph.
///
/// Unroutable demands are recorded and skipped.
pub fn run_sequence_on(mut graph: NetworkGraph, config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate(&graph)?;
    let defaults = config.defaults()?;
    let mut global = QTable::zeroed(&graph);
    let mut select_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut loss = LossModel::new(config.loss, config.seed ^ LOSS_STREAM);

    let mut demands = Vec::with_capacity(config.demands.len());
    for (index, demand) in config.demands.iter().enumerate() {
        let request = RouteRequest {
            demand: *demand,
            use_global: config.use_global,
            weights: Some(config.weights),
            hyper: Some(config.hyper),
        };
        let mut env = SimulatedDataPlane::new(&graph, loss);
        let result = find_route(&request, &defaults, &mut env, &mut global, &mut select_rng);
        loss = env.into_loss_model();

        let report = match result {
            Ok(run) => {
                let outcome = if run.final_path.reached_destination() {
                    graph.place_traffic(&run.final_path, demand)?;
                    DemandOutcome::Placed {
                        final_path: run.final_path,
                    }
                } else {
                    DemandOutcome::Unroutable {
                        reason: format!("final path {} does not reach {}", run.final_path, demand.dst),
                    }
                };
                DemandReport {
                    index,
                    demand: *demand,
                    outcome,
                    convergence_episode: detect_convergence(&run.traces),
                    temp_path_lengths: run.traces.iter().map(|t| t.path_length).collect(),
                    messages_with_aggregation: run.traces.iter().map(|t| t.messages_with_aggregation).sum(),
                    messages_without_aggregation: run.traces.iter().map(|t| t.messages_without_aggregation).sum(),
                }
            }
            Err(EngineError::UnroutableSource(src)) => DemandReport {
                index,
                demand: *demand,
                outcome: DemandOutcome::Unroutable {
                    reason: format!("node {src} has no outgoing links"),
                },
                convergence_episode: None,
                temp_path_lengths: Vec::new(),
                messages_with_aggregation: 0,
                messages_without_aggregation: 0,
            },
            Err(e) => return Err(e.into()),
        };
        demands.push(report);
    }

    let unconverged_demands = demands.iter().filter(|d| d.convergence_episode.is_none()).count();
    let total_convergence_episodes = demands
        .iter()
        .map(|d| d.convergence_episode.unwrap_or(config.hyper.episodes))
        .sum();
    Ok(ExperimentReport {
        topology: config.topology.label(),
        seed: config.seed,
        weights: config.weights,
        hyper: config.hyper,
        use_global: config.use_global,
        global_gamma: defaults.hyper.gamma,
        loss: config.loss,
        convergence_rule: CONVERGENCE_RULE.to_string(),
        total_convergence_episodes,
        unconverged_demands,
        messages_with_aggregation: demands.iter().map(|d| d.messages_with_aggregation).sum(),
        messages_without_aggregation: demands.iter().map(|d| d.messages_without_aggregation).sum(),
        demands,
        links: link_reports(&graph),
        max_link_utilization: graph.max_link_utilization(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaColumn {
    /// `control` or `gamma=<γ>`.
    pub label: String,
    pub use_global: bool,
    pub global_gamma: f64,
    pub convergence_episodes: Vec<Option<usize>>,
    pub total_convergence_episodes: usize,
    pub unconverged_demands: usize,
    pub max_link_utilization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaStudyReport {
    pub topology: String,
    pub seed: u64,
    pub convergence_rule: String,
    pub demands: Vec<TrafficDemand>,
    /// The control column first, then one per γ in the order given.
    pub columns: Vec<GammaColumn>,
}

impl GammaStudyReport {
    pub fn column(&self, label: &str) -> Option<&GammaColumn> {
        self.columns.iter().find(|c| c.label == label)
    }
}

fn column(label: String, report: &ExperimentReport) -> GammaColumn {
    GammaColumn {
        label,
        use_global: report.use_global,
        global_gamma: report.global_gamma,
        convergence_episodes: report.demands.iter().map(|d| d.convergence_episode).collect(),
        total_convergence_episodes: report.total_convergence_episodes,
        unconverged_demands: report.unconverged_demands,
        max_link_utilization: report.max_link_utilization,
    }
}

/// A control run without global-table reuse, then one run per γ that
/// initializes every local table from a global table trained at that γ.
/// Each run starts from the same graph and a fresh global table.
pub fn run_gamma_study(base: &ExperimentConfig, gammas: &[f64]) -> Result<GammaStudyReport, ExperimentError> {
    let graph = base.topology.load()?;
    let control_config = ExperimentConfig {
        use_global: false,
        global_gamma: None,
        ..base.clone()
    };
    let control = run_sequence_on(graph.clone(), &control_config)?;
    let mut columns = vec![column("control".to_string(), &control)];
    for &gamma in gammas {
        let config = ExperimentConfig {
            use_global: true,
            global_gamma: Some(gamma),
            ..base.clone()
        };
        let report = run_sequence_on(graph.clone(), &config)?;
        columns.push(column(format!("gamma={gamma}"), &report));
    }
    Ok(GammaStudyReport {
        topology: base.topology.label(),
        seed: base.seed,
        convergence_rule: CONVERGENCE_RULE.to_string(),
        demands: base.demands.clone(),
        columns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rlsr: ExperimentReport,
    pub baseline: BaselineReport,
}

/// The same demand sequence routed by the learner and by min-hop.
pub fn compare_baseline(config: &ExperimentConfig) -> Result<ComparisonReport, ExperimentError> {
    let graph = config.topology.load()?;
    let rlsr = run_sequence_on(graph.clone(), config)?;
    let baseline = run_baseline(graph, &config.demands)?;
    Ok(ComparisonReport { rlsr, baseline })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(b: Builtin, demands: Vec<TrafficDemand>) -> ExperimentConfig {
        ExperimentConfig {
            hyper: Hyperparameters {
                episodes: 10,
                ..Default::default()
            },
            ..ExperimentConfig::new(TopologySource::Builtin(b), demands)
        }
    }

    #[test]
    fn empty_sequence_leaves_links_untouched() {
        let report = run_sequence(&small(Builtin::T2, Vec::new())).unwrap();
        assert!(report.demands.is_empty());
        let g = Builtin::T2.graph().unwrap();
        assert_eq!(report.links, link_reports(&g));
        assert_eq!(report.total_convergence_episodes, 0);
    }

    #[test]
    fn unroutable_demand_is_recorded() {
        let demands = vec![
            TrafficDemand::new(4, 0, 1.0e5).unwrap(),
            TrafficDemand::new(0, 4, 1.0e5).unwrap(),
        ];
        let report = run_sequence(&small(Builtin::T4, demands)).unwrap();
        assert!(matches!(report.demands[0].outcome, DemandOutcome::Unroutable { .. }));
        assert_eq!(report.demands[1].final_path().unwrap().nodes(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn invalid_demand_is_rejected() {
        let demands = vec![TrafficDemand::new(0, 9, 1.0).unwrap()];
        let err = run_sequence(&small(Builtin::T1, demands)).unwrap_err();
        assert!(matches!(err, ExperimentError::Demand { index: 0, .. }));
    }

    #[test]
    fn placement_adds_traffic() {
        let demands = vec![TrafficDemand::new(0, 4, 1.0e6).unwrap()];
        let report = run_sequence(&small(Builtin::T1, demands)).unwrap();
        for l in &report.links {
            let expected = if l.src == 4 { 0.0 } else { 1.0e6 };
            assert_eq!(l.used_bandwidth_bps, expected, "{}->{}", l.src, l.dst);
        }
        assert!((report.max_link_utilization - 0.1).abs() < 1e-12);
    }

    #[test]
    fn gamma_study_columns() {
        let demands = vec![TrafficDemand::new(0, 3, 1.0e5).unwrap(); 2];
        let study = run_gamma_study(&small(Builtin::T2, demands), &[0.9]).unwrap();
        let labels: Vec<_> = study.columns.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["control", "gamma=0.9"]);
        assert!(!study.columns[0].use_global);
        assert!(study.columns[1].use_global);
    }
}
