use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rlsr::harness::{
    compare_baseline, emit_baseline, emit_gamma_study, emit_reports, run_gamma_study, run_sequence, Builtin,
    ExperimentConfig, ExperimentReport, TopologySource, DEFAULT_SEED,
};
use rlsr::net::load_demands;
use rlsr::{Hyperparameters, LossMode, QoSWeights};

#[derive(Parser)]
#[command(name = "rlsr", version, about = "Reinforcement-learning segment routing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn and place a demand sequence.
    Run(RunArgs),
    /// Convergence with and without global-table reuse across discount factors.
    GammaStudy {
        #[command(flatten)]
        run: RunArgs,
        /// Discount factors for the global table.
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7, 0.9])]
        gammas: Vec<f64>,
    },
    /// Route the same sequence with the learner and with min-hop.
    CompareBaseline(RunArgs),
    /// Parse a topology and report its size.
    ValidateTopology {
        /// Built-in id (t1, t2, t3, t4, t7, t8) or a JSON file.
        #[arg(long)]
        topology: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Loss {
    Off,
    Bernoulli,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in id (t1, t2, t3, t4, t7, t8) or a JSON file.
    #[arg(long)]
    topology: String,
    /// JSON demand list; defaults to the built-in topology's sequence.
    #[arg(long)]
    demands: Option<PathBuf>,
    /// Local reward weights as wc,wt,wr,wi,wu.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<QoSWeights>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    ttl: Option<usize>,
    #[arg(long)]
    episodes: Option<usize>,
    /// Initialize each local table from the global table.
    #[arg(long)]
    use_global: bool,
    /// Discount factor for the global table.
    #[arg(long)]
    global_gamma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "off")]
    loss: Loss,
    /// Directory for reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_weights(s: &str) -> Result<QoSWeights, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [wc, wt, wr, wi, wu] = parts[..] else {
        return Err(format!("expected 5 comma-separated weights, got {}", parts.len()));
    };
    QoSWeights::new(wc, wt, wr, wi, wu).map_err(|e| e.to_string())
}

fn topology_source(arg: &str) -> TopologySource {
    match arg.parse::<Builtin>() {
        Ok(b) => TopologySource::Builtin(b),
        Err(_) => TopologySource::File(PathBuf::from(arg)),
    }
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let topology = topology_source(&self.topology);
        let demands = match (&self.demands, &topology) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                load_demands(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            (None, TopologySource::Builtin(b)) => b.demands()?,
            (None, TopologySource::File(_)) => Vec::new(),
        };
        let defaults = Hyperparameters::default();
        let hyper = Hyperparameters {
            epsilon: self.epsilon.unwrap_or(defaults.epsilon),
            alpha: self.alpha.unwrap_or(defaults.alpha),
            gamma: self.gamma.unwrap_or(defaults.gamma),
            ttl: self.ttl.unwrap_or(defaults.ttl),
            episodes: self.episodes.unwrap_or(defaults.episodes),
            terminal_q: defaults.terminal_q,
        };
        hyper.validate()?;
        Ok(ExperimentConfig {
            weights: self.weights.unwrap_or_default(),
            hyper,
            use_global: self.use_global,
            global_gamma: self.global_gamma,
            seed: self.seed,
            loss: match self.loss {
                Loss::Off => LossMode::Off,
                Loss::Bernoulli => LossMode::Bernoulli,
            },
            out_dir: self.out.clone(),
            ..ExperimentConfig::new(topology, demands)
        })
    }
}

fn print_summary(report: &ExperimentReport) {
    for d in &report.demands {
        let path = d.final_path().map_or_else(|| "unroutable".to_string(), |p| p.to_string());
        let conv = d.convergence_episode.map_or_else(|| "-".to_string(), |e| e.to_string());
        println!("{:>3}  {}->{}  {}  converged at {}", d.index, d.demand.src, d.demand.dst, path, conv);
    }
    println!("max link utilization {:.4}", report.max_link_utilization);
    println!("total convergence episodes {}", report.total_convergence_episodes);
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let config = args.config()?;
            let report = run_sequence(&config)?;
            print_summary(&report);
            if let Some(dir) = &config.out_dir {
                emit_reports(&report, dir)?;
            }
        }
        Command::GammaStudy { run, gammas } => {
            if gammas.is_empty() {
                bail!("--gammas needs at least one value");
            }
            let config = run.config()?;
            let study = run_gamma_study(&config, &gammas)?;
            for c in &study.columns {
                println!("{:<12} total {:>5}  unconverged {}", c.label, c.total_convergence_episodes, c.unconverged_demands);
            }
            if let Some(dir) = &config.out_dir {
                emit_gamma_study(&study, dir)?;
            }
        }
        Command::CompareBaseline(args) => {
            let config = args.config()?;
            let cmp = compare_baseline(&config)?;
            print_summary(&cmp.rlsr);
            println!("min-hop max link utilization {:.4}", cmp.baseline.max_link_utilization);
            if let Some(dir) = &config.out_dir {
                emit_reports(&cmp.rlsr, dir)?;
                emit_baseline(&cmp.baseline, dir)?;
            }
        }
        Command::ValidateTopology { topology } => {
            let source = topology_source(&topology);
            let graph = source
                .load()
                .with_context(|| format!("invalid topology {}", source.label()))?;
            println!(
                "{}: {} nodes, {} links, max link utilization {:.4}",
                source.label(),
                graph.node_count(),
                graph.link_count(),
                graph.max_link_utilization()
            );
        }
    }
    Ok(())
}
