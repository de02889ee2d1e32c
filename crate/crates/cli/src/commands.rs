//! Subcommand implementations.

use crate::output::{write_json, Manifest, RunRecord};
use crate::{Command, GraphSource};
use qroute_core::algorithms::{self, AlgoError, AlgoOptions};
use qroute_core::electric::{ElectricNetwork, WalkToken};
use qroute_core::graph::fileio;
use qroute_core::lowerbound::relations::{
    bfs_relation_params, connectivity_relation_params, EnumError,
};
use qroute_core::oracle::bfs_distances;
use qroute_core::primitives::ClusterState;
use qroute_core::sim::{schedule_walks, Fidelity, ScheduleMode, WalkRequest};
use qroute_core::sweep;
use qroute_core::{MessageLedger, PortedGraph};
use rand::SeedableRng;
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invariant(String),
    Budget(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Invariant(_) => ExitCode::from(1),
            CliError::Budget(_) => ExitCode::from(3),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Invariant(m) => write!(f, "{m}"),
            CliError::Budget(m) => write!(f, "refused: {m}"),
        }
    }
}

impl From<qroute_core::graph::generate::GenError> for CliError {
    fn from(e: qroute_core::graph::generate::GenError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AlgoError> for CliError {
    fn from(e: AlgoError) -> Self {
        match e {
            AlgoError::ExactBudgetExceeded { .. } => CliError::Budget(e.to_string()),
            AlgoError::Disconnected { .. } => CliError::Invariant(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::BudgetExceeded(_, _) => CliError::Budget(e.to_string()),
            EnumError::BadParameters(_) => CliError::Usage(e.to_string()),
        }
    }
}

fn load_graph(source: &GraphSource, default_seed: u64) -> Result<PortedGraph, CliError> {
    match (&source.graph, &source.gen) {
        (Some(path), None) => fileio::read_graph_file(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        (None, Some(spec)) => crate::gen::build(spec, source.gen_seed.unwrap_or(default_seed)),
        _ => Err(CliError::usage("exactly one of --graph or --gen is required")),
    }
}

fn parse_fidelity(spec: &Option<String>) -> Result<Option<Fidelity>, CliError> {
    match spec.as_deref() {
        None => Ok(None),
        Some("exact") => Ok(Some(Fidelity::Exact)),
        Some("cost") | Some("cost-model") => Ok(Some(Fidelity::CostModel)),
        Some(other) => Err(CliError::usage(format!("unknown fidelity `{other}`"))),
    }
}

pub fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Validate { source } => {
            let graph = load_graph(&source, 0)?;
            let violations = graph.validate();
            for v in &violations {
                println!("violation: {v}");
            }
            if violations.is_empty() {
                println!("ok: n={} m={} hash={:016x}", graph.node_count(), graph.edge_count(),
                    graph.content_hash());
                Ok(ExitCode::SUCCESS)
            } else {
                Err(CliError::Invariant(format!("{} violations", violations.len())))
            }
        }
        Command::Effres { source, root, marked } => {
            let graph = load_graph(&source, 0)?;
            let net = ElectricNetwork::from_graph(&graph, root, marked, WalkToken::new(0, 0))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let r = net
                .effective_resistance()
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            println!("{r}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            algorithm,
            source,
            seed,
            delta,
            fidelity,
            out,
            root,
            marked,
            kappa,
            width,
            n_star,
            rounds_cap,
            dump_graph,
            json,
        } => {
            let graph = load_graph(&source, seed)?;
            if let Some(path) = &dump_graph {
                fileio::write_graph_file(&graph, path)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let options = AlgoOptions {
                delta,
                fidelity: parse_fidelity(&fidelity)?,
                seed,
                ..AlgoOptions::default()
            };
            run_algorithm(
                &algorithm, &graph, &options, root, &marked, kappa, width, n_star, rounds_cap,
                out, json,
            )
        }
        Command::Sweep { algorithm, n, reps, seed, out, json } => {
            let summary = match algorithm.as_str() {
                "mst" => sweep::mst_sweep(&n, reps, seed),
                "bfs" => sweep::bfs_sweep(&n, reps, seed),
                other => return Err(CliError::usage(format!("unknown sweep `{other}`"))),
            }
            .map_err(|e| match e {
                sweep::SweepError::EmptyGrid => CliError::usage("empty grid"),
                other => CliError::Invariant(other.to_string()),
            })?;
            let csv = sweep::to_csv(&summary);
            match &out {
                Some(path) => std::fs::write(path, &csv)?,
                None => print!("{csv}"),
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            } else {
                println!(
                    "# {}: slope={:.4} (95% ci +-{:.4}) intercept={:.4}",
                    summary.algorithm, summary.slope, summary.slope_ci, summary.intercept
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lb { family, n, d } => {
            let params = match family.as_str() {
                "bfs" => bfs_relation_params(
                    n,
                    d.ok_or_else(|| CliError::usage("bfs family needs --d"))?,
                )?,
                "connectivity" => connectivity_relation_params(n)?,
                other => return Err(CliError::usage(format!("unknown family `{other}`"))),
            };
            println!("{}", serde_json::to_string_pretty(&params).unwrap());
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_algorithm(
    algorithm: &str,
    graph: &PortedGraph,
    options: &AlgoOptions,
    root: usize,
    marked: &[usize],
    kappa: Option<u32>,
    width: u32,
    n_star: Option<usize>,
    rounds_cap: Option<u64>,
    out: Option<std::path::PathBuf>,
    json: bool,
) -> Result<ExitCode, CliError> {
    let n = graph.node_count();
    let fidelity = options
        .resolve_fidelity(n, graph.edge_count())
        .map(|f| format!("{f:?}"))
        .unwrap_or_else(|_| "cost-model".into());
    let manifest = Manifest::new(algorithm, options.seed, options.delta, &fidelity, graph);
    let emit = |result: serde_json::Value, ledger: &MessageLedger| -> Result<ExitCode, CliError> {
        if let Some(cap) = rounds_cap {
            if ledger.rounds() > cap {
                return Err(CliError::Invariant(format!(
                    "run used {} rounds, over the cap {cap}",
                    ledger.rounds()
                )));
            }
        }
        let export = ledger.export(
            &manifest.run_id,
            options.seed,
            n,
            graph.edge_count(),
            algorithm,
        );
        let record = RunRecord { manifest, result, ledger: export };
        if let Some(dir) = &out {
            let path = write_json(dir, &format!("{}.json", record.manifest.run_id), &record)?;
            println!("wrote {}", path.display());
        }
        if json || out.is_none() {
            println!("{}", serde_json::to_string_pretty(&record).unwrap());
        }
        Ok(ExitCode::SUCCESS)
    };
    match algorithm {
        "mst" => {
            let (output, ledger, _) = algorithms::mst(graph, options)?;
            emit(serde_json::to_value(&output).unwrap(), &ledger)
        }
        "le" => {
            let (output, ledger) = algorithms::leader_election(graph, options)?;
            emit(serde_json::to_value(&output).unwrap(), &ledger)
        }
        "broadcast" => {
            let (reached, ledger) = algorithms::broadcast_via_st(graph, root, options)?;
            if !reached.iter().all(|&r| r) {
                return Err(CliError::Invariant("broadcast did not reach every node".into()));
            }
            emit(serde_json::json!({ "reached": reached.len() }), &ledger)
        }
        "bfs" => {
            let (output, _, ledger, _) = algorithms::bfs(graph, root, options)?;
            emit(serde_json::to_value(&output).unwrap(), &ledger)
        }
        "cover" => {
            let mut ledger = options.ledger();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
            let kappa = kappa.unwrap_or_else(|| (n.max(2) as f64).log2().ceil() as u32);
            let cover = algorithms::sparse_cover(
                graph,
                kappa,
                width,
                options.constants.walk_delta(options.delta),
                &options.constants,
                &mut rng,
                &mut ledger,
            )?;
            let audit = cover.audit(graph);
            if !audit.neighborhood_ok {
                return Err(CliError::Invariant("cover misses a neighborhood".into()));
            }
            emit(
                serde_json::json!({ "trees": cover.trees.len(), "audit": audit }),
                &ledger,
            )
        }
        "findany" | "findmin" => {
            let cluster = cluster_around(graph, root, n_star.unwrap_or(n))?;
            let mut ledger = options.ledger();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
            let fidelity = options.resolve_fidelity(n, graph.edge_count())?;
            let n_star = n_star.unwrap_or(n);
            let result = if algorithm == "findany" {
                let found = qroute_core::primitives::find_any(
                    graph,
                    std::slice::from_ref(&cluster),
                    n_star,
                    options.delta,
                    fidelity,
                    &options.constants,
                    &mut rng,
                    &mut ledger,
                    None,
                )
                .map_err(|e| CliError::Invariant(e.to_string()))?;
                serde_json::json!({ "cluster": cluster.members, "port": found[0] })
            } else {
                let found = qroute_core::primitives::find_min(
                    graph,
                    std::slice::from_ref(&cluster),
                    n_star,
                    options.delta,
                    fidelity,
                    &options.constants,
                    &mut rng,
                    &mut ledger,
                    None,
                )
                .map_err(|e| CliError::Invariant(e.to_string()))?;
                serde_json::json!({ "cluster": cluster.members, "edge": found[0] })
            };
            emit(result, &ledger)
        }
        "walk-detect" => {
            let net = ElectricNetwork::from_graph(
                graph,
                root,
                marked.iter().copied(),
                WalkToken::new(1, 0),
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let w = net.total_weight().max(1.0);
            let r = if net.marked.is_empty() {
                1.0
            } else {
                net.effective_resistance()
                    .map_err(|e| CliError::Invariant(e.to_string()))?
                    .max(1.0)
            };
            let rep = (0..graph.degree(root)).map(|p| (root, p)).next();
            let request =
                WalkRequest { net, r_bound: r, w_bound: w, delta: options.delta, rep };
            let mut ledger = options.ledger();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
            let fidelity = options.resolve_fidelity(n, graph.edge_count())?;
            let outcomes = schedule_walks(
                std::slice::from_ref(&request),
                ScheduleMode::Exclusive,
                fidelity,
                &options.constants,
                &mut rng,
                &mut ledger,
                "walk_detect",
                None,
            )
            .map_err(|e| CliError::Invariant(e.to_string()))?;
            emit(
                serde_json::json!({
                    "verdict": outcomes[0].verdict,
                    "trials": outcomes[0].detection.trials,
                    "steps_per_trial": outcomes[0].detection.steps_per_trial,
                    "exact_p1": outcomes[0].detection.exact_p1,
                }),
                &ledger,
            )
        }
        other => Err(CliError::usage(format!("unknown algorithm `{other}`"))),
    }
}

/// A cluster for the findany/findmin surface: the BFS ball of radius 1
/// around `root`, spanned by its BFS tree, capped at `cap` members.
fn cluster_around(
    graph: &PortedGraph,
    root: usize,
    cap: usize,
) -> Result<ClusterState, CliError> {
    if root >= graph.node_count() {
        return Err(CliError::usage("root out of range"));
    }
    let dist = bfs_distances(graph, root);
    let mut members: Vec<usize> = (0..graph.node_count())
        .filter(|&v| dist[v].is_some_and(|d| d <= 1))
        .collect();
    members.sort_by_key(|&v| (dist[v].unwrap(), v));
    members.truncate(cap.max(1));
    let mut adj: BTreeMap<usize, Vec<usize>> = members.iter().map(|&v| (v, Vec::new())).collect();
    for &v in &members {
        if v == root {
            continue;
        }
        // Radius-1 ball: everything hangs off the root.
        adj.get_mut(&root).unwrap().push(v);
        adj.get_mut(&v).unwrap().push(root);
    }
    let ids: BTreeMap<usize, u64> = members.iter().map(|&v| (v, v as u64 + 1)).collect();
    ClusterState::build(graph, root, &adj, &ids)
        .map_err(|e| CliError::Invariant(e.to_string()))
}
