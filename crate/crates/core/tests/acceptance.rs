//! Acceptance checks, one line per criterion.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlsr::engine::{find_final_path, find_route, find_temp_path, update_table, Defaults, Hyperparameters, QTable, RouteRequest};
use rlsr::harness::{
    compare_baseline, emit_reports, run_gamma_study, run_sequence, Builtin, ExperimentConfig, ExperimentReport,
};
use rlsr::net::{LinkSpec, NetworkGraph, TrafficDemand};
use rlsr::rewards::{
    local_rewards_for_path, reward_hop, reward_intensity, reward_reliability, reward_transmission, reward_utilization,
    RewardRecord,
};
use rlsr::sim::{execute_path, LossModel, SimulatedDataPlane};
use rlsr::QoSWeights;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn within(runtime: Duration, limit: Duration) -> Result<(), String> {
    if runtime < limit {
        Ok(())
    } else {
        Err(format!("took {runtime:?}, limit {limit:?}"))
    }
}

fn reward_arithmetic() -> Outcome {
    let start = Instant::now();
    let exact = [
        ("reward_hop(4)", reward_hop(4).unwrap(), 0.25),
        ("reward_reliability(0.95)", reward_reliability(0.95).unwrap(), 0.95),
        ("reward_intensity(5,50,0)", reward_intensity(5.0, 50.0, 0.0).unwrap(), 0.9),
        ("reward_intensity(5,50,0.5)", reward_intensity(5.0, 50.0, 0.5).unwrap(), 0.89),
        ("reward_utilization(5,10,0)", reward_utilization(5.0, 10.0, 0.0).unwrap(), 0.5),
        ("reward_utilization(5,10,0.5)", reward_utilization(5.0, 10.0, 0.5).unwrap(), 0.45),
    ];
    for (name, got, want) in exact {
        ensure!(got == want, "{name} = {got:?}, want {want:?}");
    }
    let t = reward_transmission(50.0).unwrap();
    ensure!((t - 0.9873).abs() <= 5e-5, "reward_transmission(50) = {t}");
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("transmission(50) = {t:.6}, six values exact"))
}

fn constants() -> Outcome {
    let w = QoSWeights::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    ensure!(w.l_constant() == 5.1, "lConstant {}", w.l_constant());
    ensure!(w.g_constant() == 3.0, "gConstant {}", w.g_constant());
    Ok("lConstant 5.1, gConstant 3.0".into())
}

fn accumulative_penalty() -> Outcome {
    let start = Instant::now();
    let graph = Builtin::T4.graph().unwrap();
    let demand = TrafficDemand::new(0, 4, 1.0e5).unwrap();
    // lConstant = 0.9 + 1 + 1 + 0.1 = 3, so a failed action is worth -3
    let weights = QoSWeights::new(0.0, 0.0, 0.9, 1.0, 1.0).unwrap();
    ensure!(weights.l_constant() == 3.0, "lConstant {}", weights.l_constant());
    let hyper = Hyperparameters {
        epsilon: 0.5,
        alpha: 1.0,
        gamma: 1.0,
        ttl: 16,
        ..Default::default()
    };
    let mut table = QTable::zeroed(&graph);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut loss = LossModel::off();
    let mut dead_end_values = Vec::new();
    let mut episodes = 0;
    while dead_end_values.len() < 3 {
        episodes += 1;
        ensure!(episodes <= 200, "only {} dead-end selections in 200 episodes", dead_end_values.len());
        let path = find_temp_path(&demand, &table, &hyper, &graph, &mut rng).unwrap();
        let exec = execute_path(&graph, &path, &demand, &mut loss).unwrap();
        let rewards = local_rewards_for_path(&exec.records, &weights, &demand).unwrap();
        update_table(&mut table, &rewards, &hyper).unwrap();
        if path.nodes() == [0, 5] {
            let last = rewards.last().unwrap();
            ensure!(!last.action_success && last.value == -3.0, "dead end reward {last:?}");
            dead_end_values.push(table.get(0, 5).unwrap());
        }
    }
    ensure!(dead_end_values == [-3.0, -6.0, -9.0], "Q(0,5) went {dead_end_values:?}");
    let final_path = find_final_path(&demand, &table, &hyper, &graph).unwrap();
    ensure!(final_path.nodes() == [0, 1, 2, 3, 4], "final path {final_path}");
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("Q(0,5) = {dead_end_values:?} over {episodes} episodes, final {final_path}"))
}

fn complete_graph(n: usize) -> NetworkGraph {
    let links: Vec<_> = (0..n)
        .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| LinkSpec::new(s, d, 1.0, 0.0, 1.0)))
        .collect();
    NetworkGraph::build(&vec![1.0; n], &links).unwrap()
}

fn aggregation_equivalence() -> Outcome {
    let graph = complete_graph(33);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nodes: Vec<usize> = (0..33).collect();
    let cases = 600;
    for case in 0..cases {
        let hyper = Hyperparameters {
            alpha: rng.gen_range(0.01..=1.0),
            gamma: rng.gen_range(0.0..=1.0),
            ..Default::default()
        };
        let mut table = QTable::zeroed(&graph);
        for l in graph.links() {
            table.set(l.src, l.dst, rng.gen_range(-4.0..0.0)).unwrap();
        }
        let mut oracle: HashMap<(usize, usize), f64> =
            graph.links().map(|l| ((l.src, l.dst), table.get(l.src, l.dst).unwrap())).collect();

        nodes.shuffle(&mut rng);
        let len = rng.gen_range(1..=32);
        let last_ok = rng.gen_bool(0.5);
        let steps: Vec<RewardRecord> = (0..len)
            .map(|i| RewardRecord {
                src_id: nodes[i],
                dst_id: nodes[i + 1],
                action_success: i + 1 < len || last_ok,
                value: rng.gen_range(-6.0..1.0),
            })
            .collect();
        update_table(&mut table, &steps, &hyper).unwrap();

        // step-interleaved: each update fires when the next action is chosen
        for t in 0..len {
            let key = (steps[t].src_id, steps[t].dst_id);
            let q = oracle[&key];
            let next = if t + 1 < len {
                Some(oracle[&(steps[t + 1].src_id, steps[t + 1].dst_id)])
            } else if steps[t].action_success {
                Some(0.0)
            } else {
                None
            };
            let updated = match next {
                Some(qn) => (1.0 - hyper.alpha) * q + hyper.alpha * (steps[t].value + hyper.gamma * qn),
                None => q + steps[t].value,
            };
            oracle.insert(key, updated);
        }
        for (&(s, a), v) in &oracle {
            let got = table.get(s, a).unwrap();
            ensure!(got.to_bits() == v.to_bits(), "case {case}: Q({s},{a}) {got} vs oracle {v}");
        }
    }
    Ok(format!("{cases} sequences bit-identical"))
}

fn loop_freedom() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut case, mut checked, mut paths) = (0usize, 0usize, 0usize);
    while checked < 1000 {
        case += 1;
        let n = rng.gen_range(2..=16);
        let density = rng.gen_range(0.1..0.7);
        let mut links = Vec::new();
        for s in 0..n {
            for d in 0..n {
                if s != d && rng.gen_bool(density) {
                    links.push(LinkSpec::new(s, d, 1.0e7, rng.gen_range(0.0..1.2e7), rng.gen_range(0.5..=1.0)));
                }
            }
        }
        let rates: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0e6..2.0e8)).collect();
        let graph = NetworkGraph::build(&rates, &links).unwrap();
        let src = rng.gen_range(0..n);
        let dst = (src + rng.gen_range(1..n)) % n;
        if graph.out_neighbors(src).is_empty() {
            continue;
        }
        let hyper = Hyperparameters {
            epsilon: rng.gen_range(0.0..=1.0),
            ttl: rng.gen_range(1..=40),
            episodes: 5,
            ..Default::default()
        };
        let request = RouteRequest {
            hyper: Some(hyper),
            use_global: rng.gen_bool(0.5),
            ..RouteRequest::new(TrafficDemand::new(src, dst, 1.0e5).unwrap())
        };
        let mut env = SimulatedDataPlane::new(&graph, LossModel::bernoulli(rng.gen()));
        let mut global = QTable::zeroed(&graph);
        let run = find_route(&request, &Defaults::default(), &mut env, &mut global, &mut rng).unwrap();
        checked += 1;
        for p in run.traces.iter().map(|t| &t.temp_path).chain([&run.final_path]) {
            paths += 1;
            ensure!(p.is_simple(), "case {case}: {p} repeats a node");
            ensure!(p.hop_count() <= hyper.ttl, "case {case}: {p} exceeds ttl {}", hyper.ttl);
        }
    }
    Ok(format!("{checked} graphs, {paths} paths, zero violations"))
}

fn t8_config() -> ExperimentConfig {
    ExperimentConfig {
        weights: QoSWeights::new(0.0, 0.0, 0.0, 1.0, 1.0).unwrap(),
        ..ExperimentConfig::builtin(Builtin::T8).unwrap()
    }
}

fn message_accounting() -> Outcome {
    let config = t8_config();
    let mut graph = Builtin::T8.graph().unwrap();
    let defaults = Defaults::default();
    let mut global = QTable::zeroed(&graph);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut episodes, mut with, mut without) = (0, 0, 0);
    for demand in &config.demands {
        let request = RouteRequest {
            weights: Some(config.weights),
            ..RouteRequest::new(*demand)
        };
        let mut env = SimulatedDataPlane::lossless(&graph);
        let run = find_route(&request, &defaults, &mut env, &mut global, &mut rng).unwrap();
        for t in &run.traces {
            ensure!(t.delivered, "episode {} not delivered", t.episode);
            let n = t.path_length;
            ensure!(t.messages_with_aggregation == n + 1, "{n} hops, {} with", t.messages_with_aggregation);
            ensure!(t.messages_without_aggregation == 2 * n, "{n} hops, {} without", t.messages_without_aggregation);
            episodes += 1;
            with += t.messages_with_aggregation;
            without += t.messages_without_aggregation;
        }
        graph.place_traffic(&run.final_path, demand).unwrap();
    }
    let report = run_sequence(&config).unwrap();
    ensure!(
        report.messages_with_aggregation == with && report.messages_without_aggregation == without,
        "report totals differ from the trace"
    );
    Ok(format!("{episodes} delivered episodes: {with} messages aggregated vs {without}"))
}

fn t8_chain() -> Outcome {
    let start = Instant::now();
    let config = t8_config();
    let graph = Builtin::T8.graph().unwrap();
    let loaded: BTreeSet<(usize, usize)> = graph
        .links()
        .filter(|l| l.used_bandwidth == 9.0e6)
        .map(|l| (l.src, l.dst))
        .collect();
    let heads: BTreeSet<usize> = loaded.iter().map(|&(_, d)| d).collect();
    ensure!(loaded.len() == 5, "expected five pre-loaded links, found {loaded:?}");

    let report = run_sequence(&config).unwrap();
    ensure!(report.demands.len() == 9, "{} demands", report.demands.len());
    let chain = [4, 7, 6, 10, 14, 18, 19, 23];
    for d in &report.demands {
        let p = d.final_path().ok_or(format!("demand {} unroutable", d.index))?;
        let conv = d.convergence_episode.ok_or(format!("{p} never converged"))?;
        ensure!(conv <= config.hyper.episodes, "{p} converged at {conv}");
        ensure!(p.is_simple() && p.reached_destination(), "{p} invalid");
        ensure!(p.hops().all(|h| !loaded.contains(&h)), "{p} uses a 9 Mb/s link");
        ensure!(p.nodes().iter().all(|n| !heads.contains(n)), "{p} visits a loaded head");
        let inner = &p.nodes()[1..p.nodes().len() - 1];
        ensure!(inner == chain, "{p} leaves the chain");
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    let convs: Vec<_> = report.demands.iter().map(|d| d.convergence_episode.unwrap()).collect();
    Ok(format!("9/9 on the chain, convergence episodes {convs:?}"))
}

fn global_reuse() -> Outcome {
    let gammas = [0.3, 0.5, 0.7, 0.9];
    let mut lines = Vec::new();
    let mut sums = [0usize; 5];
    for seed in 0..5 {
        let config = ExperimentConfig { seed, ..t8_config() };
        let study = run_gamma_study(&config, &gammas).unwrap();
        let totals: Vec<usize> = study.columns.iter().map(|c| c.total_convergence_episodes).collect();
        for (s, t) in sums.iter_mut().zip(&totals) {
            *s += t;
        }
        let (control, best) = (totals[0], totals[4]);
        ensure!(best < control, "seed {seed}: γ=0.9 total {best} not below control {control}");
        let rivals = totals[..4].iter().copied().min().unwrap();
        ensure!(
            best as f64 <= 1.05 * rivals as f64,
            "seed {seed}: γ=0.9 total {best} above 105% of {rivals} ({totals:?})"
        );
        lines.push(format!("{totals:?}"));
    }
    Ok(format!(
        "[control, 0.3, 0.5, 0.7, 0.9] totals per seed {}",
        lines.join(" ")
    ))
}

fn load_balancing() -> Outcome {
    let start = Instant::now();
    let config = ExperimentConfig {
        weights: QoSWeights::new(0.0, 0.0, 0.0, 0.0, 1.0).unwrap(),
        ..ExperimentConfig::builtin(Builtin::T7).unwrap()
    };
    ensure!(config.demands.len() == 22, "{} demands", config.demands.len());
    let cmp = compare_baseline(&config).unwrap();
    let (ours, bfs) = (cmp.rlsr.max_link_utilization, cmp.baseline.max_link_utilization);
    ensure!(cmp.rlsr.demands.iter().all(|d| d.final_path().is_some()), "a demand was not placed");
    ensure!(ours <= bfs, "learned {ours} above min-hop {bfs}");
    ensure!(ours <= 0.55, "learned max utilization {ours}");
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("max link utilization {ours:.4} vs min-hop {bfs:.4}"))
}

fn report_bytes(config: &ExperimentConfig) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let report: ExperimentReport = run_sequence(config).unwrap();
    emit_reports(&report, dir.path()).unwrap();
    std::fs::read(dir.path().join("report.json")).unwrap()
}

fn determinism() -> Outcome {
    let exploring = ExperimentConfig {
        hyper: Hyperparameters {
            epsilon: 0.3,
            ..Default::default()
        },
        loss: rlsr::LossMode::Bernoulli,
        ..ExperimentConfig::builtin(Builtin::T7).unwrap()
    };
    for config in [t8_config(), exploring] {
        let a = report_bytes(&config);
        let b = report_bytes(&config);
        ensure!(a == b, "report.json differs between runs on {:?}", config.topology);
    }
    Ok("report.json byte-identical for T8 and an exploring lossy T7 run".into())
}

fn main() -> ExitCode {
    let criteria: [Check; 10] = [
        ("reward arithmetic", reward_arithmetic),
        ("weight constants", constants),
        ("accumulative penalty", accumulative_penalty),
        ("aggregation equivalence", aggregation_equivalence),
        ("loop freedom and ttl", loop_freedom),
        ("message accounting", message_accounting),
        ("T8 congestion avoidance", t8_chain),
        ("global table reuse", global_reuse),
        ("load balancing vs min-hop", load_balancing),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
