//! Outgoing-edge primitives.
//!
//! `find_any` locates, per cluster, an edge leaving the cluster; `find_min`
//! its minimum-weight one. Both follow the same two-tier scheme: cheap
//! classical resolution when the cluster can afford it, walks otherwise.
//!
//! A probe ("is there an outgoing edge under this restriction?") is resolved
//! through a ladder:
//!
//! 1. *High-degree*: a node whose restricted degree exceeds the cluster size
//!    must be incident to a restricted outgoing edge; the minimum-id such
//!    node probes its ports in ascending order until one replies with a
//!    foreign cluster id.
//! 2. *Direct*: when the restricted incident edge count is at most the
//!    cluster size, probing them all costs no more than the convergecast the
//!    probe already paid for, and answers exactly.
//! 3. *Walk*: otherwise a quantum walk detects a marked vertex on the
//!    implicit electric network whose edges are the cluster tree (weighted
//!    by depth) plus the restricted incident edges (unit weight), with the
//!    outside endpoints marked. Tree weights keep the effective resistance
//!    at most `1 + log2(n_i)` while the total weight stays below `2 n_i^2`.
//!
//! All clusters in a call run their walks concurrently in marked-shared
//! mode: two clusters' networks can only share an edge between their
//! boundaries, whose outside endpoint is marked for at least one of them.

use super::{ClusterState, PrimitiveError};
use crate::config::RunConstants;
use crate::electric::{ElectricNetwork, NetEdge, WalkToken};
use crate::graph::{EdgeId, NodeId, Port, PortedGraph};
use crate::sim::{schedule_walks, Fidelity, MessageLedger, ScheduleMode, WalkRequest};
use crate::walk::MarkedVerdict;
use rand::Rng;
use serde::Serialize;
use std::collections::HashSet;

/// An edge endpoint inside a cluster: the answer format of the primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutPort {
    pub node: NodeId,
    pub port: Port,
}

/// Audit record for one constructed walk network.
#[derive(Debug, Clone, Serialize)]
pub struct WalkAudit {
    pub cluster_id: u64,
    pub cluster_size: usize,
    pub declared_r: f64,
    pub declared_w: f64,
    pub total_weight: f64,
    pub effective_resistance: Option<f64>,
    pub marked_count: usize,
}

#[derive(Clone, Copy)]
struct Probe<'a> {
    /// Weight window `[lo, hi)` for non-tree edges; tree edges always count.
    w_lo: f64,
    w_hi: f64,
    /// Members whose incident edges are considered.
    active: &'a [NodeId],
    allow_highdeg: bool,
    prefer_min_weight: bool,
}

enum Resolution {
    Found { port: OutPort, weight: f64, exact_min: bool },
    NoneInRange,
    NeedWalk,
}

fn tree_edge_ids(graph: &PortedGraph, cluster: &ClusterState) -> HashSet<EdgeId> {
    cluster
        .members
        .iter()
        .filter_map(|&v| cluster.info[&v].parent_port.map(|p| graph.edge_id(v, p)))
        .collect()
}

/// Charge messages for reporting from `from` up to the root.
fn charge_report(
    graph: &PortedGraph,
    cluster: &ClusterState,
    from: NodeId,
    ledger: &mut MessageLedger,
    phase: &str,
) {
    let mut msgs = Vec::new();
    let mut v = from;
    while let Some(p) = cluster.info[&v].parent_port {
        msgs.push((v, p));
        v = graph.neighbor(v, p);
    }
    let rounds = msgs.len() as u64;
    ledger.charge_classical(phase, msgs);
    ledger.advance_rounds(phase, rounds);
}

/// One probe of the resolution ladder. Always pays the coordination
/// convergecast/broadcast bundle (`3(n_i - 1)` messages); high-degree and
/// direct resolutions add their probe exchanges.
#[allow(clippy::too_many_arguments)]
fn resolve_probe(
    graph: &PortedGraph,
    cluster: &ClusterState,
    tree_ids: &HashSet<EdgeId>,
    probe: Probe<'_>,
    constants: &RunConstants,
    ledger: &mut MessageLedger,
    phase: &str,
) -> Resolution {
    let n_i = cluster.size();
    // Announce the restriction, aggregate degrees and counts, broadcast the
    // dispatch decision.
    ledger.charge_classical(phase, cluster.downward_messages());
    ledger.charge_classical(phase, cluster.upward_messages());
    ledger.charge_classical(phase, cluster.downward_messages());
    ledger.advance_rounds(phase, 3 * cluster.tree_depth() as u64 + 1);

    let in_window = |e: EdgeId| {
        let w = graph.edge_weight(e);
        w >= probe.w_lo && w < probe.w_hi && !tree_ids.contains(&e)
    };
    let restricted_ports = |v: NodeId| {
        graph
            .neighbors(v)
            .filter(move |&(p, _)| in_window(graph.edge_id(v, p)))
    };
    let mut total_count = 0u64;
    let mut highdeg: Option<(u64, NodeId)> = None;
    for &v in probe.active {
        let cnt = restricted_ports(v).count();
        total_count += cnt as u64;
        if probe.allow_highdeg {
            let tree_deg = cluster.info[&v].child_ports.len()
                + usize::from(cluster.info[&v].parent_port.is_some());
            if cnt + tree_deg > n_i {
                let key = (cluster.info[&v].node_id, v);
                if highdeg.is_none_or(|(id, _)| key.0 < id) {
                    highdeg = Some(key);
                }
            }
        }
    }
    if let Some((_, h)) = highdeg {
        // The minimum-id high-degree node probes ascending ports until a
        // reply carries a foreign cluster id; at most n_i + 1 exchanges.
        let mut probes = 0u64;
        for (p, u) in restricted_ports(h) {
            probes += 1;
            ledger.charge_classical(phase, [(h, p), (u, graph.inverse_port(h, p))]);
            if !cluster.contains(u) {
                ledger.advance_rounds(phase, 2 * probes);
                charge_report(graph, cluster, h, ledger, phase);
                let weight = graph.edge_weight(graph.edge_id(h, p));
                return Resolution::Found {
                    port: OutPort { node: h, port: p },
                    weight,
                    exact_min: false,
                };
            }
        }
        ledger.advance_rounds(phase, 2 * probes);
        // A high-degree node always finds an outgoing edge within its
        // restricted ports; reaching here means the window held none, which
        // contradicts the degree count.
        unreachable!("high-degree node without restricted outgoing edge");
    }
    if total_count <= (constants.direct_probe_factor * n_i as f64) as u64 {
        // Cheap exact resolution: probe every restricted incident edge.
        let mut best: Option<(f64, u64, OutPort)> = None;
        let mut exchanges = Vec::new();
        for &v in probe.active {
            for (p, u) in restricted_ports(v) {
                exchanges.push((v, p));
                exchanges.push((u, graph.inverse_port(v, p)));
                if !cluster.contains(u) {
                    let w = graph.edge_weight(graph.edge_id(v, p));
                    let key = if probe.prefer_min_weight {
                        (w, cluster.info[&v].node_id, OutPort { node: v, port: p })
                    } else {
                        (0.0, cluster.info[&v].node_id, OutPort { node: v, port: p })
                    };
                    if best
                        .as_ref()
                        .is_none_or(|b| (key.0, key.1) < (b.0, b.1))
                    {
                        best = Some(key);
                    }
                }
            }
        }
        ledger.charge_classical(phase, exchanges);
        // Report findings to the root.
        ledger.charge_classical(phase, cluster.upward_messages());
        ledger.advance_rounds(phase, cluster.tree_depth() as u64 + 2);
        return match best {
            Some((w, _, port)) => Resolution::Found { port, weight: w, exact_min: true },
            None => Resolution::NoneInRange,
        };
    }
    Resolution::NeedWalk
}

/// Builds the implicit electric network for a walk probe.
fn walk_network(
    graph: &PortedGraph,
    cluster: &ClusterState,
    tree_ids: &HashSet<EdgeId>,
    probe: &Probe<'_>,
    payload: u64,
) -> (ElectricNetwork, Option<(NodeId, Port)>) {
    let mut edges: Vec<NetEdge> = Vec::new();
    let mut included: HashSet<EdgeId> = HashSet::new();
    let mut rep = None;
    for &v in &cluster.members {
        if let Some(p) = cluster.info[&v].parent_port {
            let parent = graph.neighbor(v, p);
            let e = graph.edge_id(v, p);
            if included.insert(e) {
                let weight = cluster.info[&v].depth.max(cluster.info[&parent].depth) as f64;
                edges.push(NetEdge { u: v, v: parent, weight, base_edge: Some(e) });
                if rep.is_none() {
                    rep = Some((v, p));
                }
            }
        }
    }
    let mut marked = std::collections::BTreeSet::new();
    for &v in probe.active {
        for (p, u) in graph.neighbors(v) {
            let e = graph.edge_id(v, p);
            let w = graph.edge_weight(e);
            if tree_ids.contains(&e) || w < probe.w_lo || w >= probe.w_hi {
                continue;
            }
            if included.insert(e) {
                edges.push(NetEdge { u: v, v: u, weight: 1.0, base_edge: Some(e) });
                if rep.is_none() {
                    rep = Some((v, p));
                }
            }
            if !cluster.contains(u) {
                marked.insert(u);
            }
        }
    }
    let token = WalkToken::new(cluster.id, payload);
    let net = ElectricNetwork { edges, root: cluster.root, marked, token };
    (net, rep)
}

#[allow(clippy::too_many_arguments)]
fn make_walk_request(
    graph: &PortedGraph,
    cluster: &ClusterState,
    tree_ids: &HashSet<EdgeId>,
    probe: &Probe<'_>,
    payload: u64,
    delta_walk: f64,
    constants: &RunConstants,
    audit: &mut Option<&mut Vec<WalkAudit>>,
) -> WalkRequest {
    let n_i = cluster.size() as f64;
    let (net, rep) = walk_network(graph, cluster, tree_ids, probe, payload);
    let r_bound = 1.0 + n_i.log2().max(0.0);
    let w_bound = 2.0 * n_i * n_i;
    if let Some(records) = audit.as_mut() {
        let reff = if !net.marked.is_empty() && net.nodes().len() <= constants.audit_max_nodes {
            net.effective_resistance().ok()
        } else {
            None
        };
        records.push(WalkAudit {
            cluster_id: cluster.id,
            cluster_size: cluster.size(),
            declared_r: r_bound,
            declared_w: w_bound,
            total_weight: net.total_weight(),
            effective_resistance: reff,
            marked_count: net.marked.len(),
        });
    }
    WalkRequest { net, r_bound, w_bound, delta: delta_walk, rep }
}

// ---------------------------------------------------------------------------
// find_min
// ---------------------------------------------------------------------------

enum MinState {
    FullRange,
    Bisect { lo: usize, hi: usize },
    Done(Option<(OutPort, f64)>),
}

struct MinMachine {
    cluster: usize,
    state: MinState,
    pending: Option<(usize, usize)>,
    probe_seq: u64,
}

/// Per-cluster minimum-weight outgoing edge.
///
/// Binary search over the global weight order (weights are poly-bounded and
/// pairwise distinct, so rank windows and value windows coincide); each
/// window probe runs the resolution ladder. A direct (exact) resolution of
/// the lower window immediately yields the global minimum; otherwise the
/// search narrows to a single weight and the owning endpoint confirms it
/// with one exchange.
#[allow(clippy::too_many_arguments)]
pub fn find_min<R: Rng>(
    graph: &PortedGraph,
    clusters: &[ClusterState],
    n_star: usize,
    delta: f64,
    fidelity: Fidelity,
    constants: &RunConstants,
    rng: &mut R,
    ledger: &mut MessageLedger,
    mut audit: Option<&mut Vec<WalkAudit>>,
) -> Result<Vec<Option<(OutPort, f64)>>, PrimitiveError> {
    let phase = "find_min";
    let mut sorted: Vec<f64> = (0..graph.edge_count()).map(|e| graph.edge_weight(e)).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(PrimitiveError::DuplicateWeights(w[0]));
        }
    }
    let weight_at = |rank: usize| -> f64 {
        if rank >= sorted.len() {
            f64::INFINITY
        } else {
            sorted[rank]
        }
    };
    let delta_walk = constants.walk_delta(delta);
    let m = graph.edge_count();
    let mut results: Vec<Option<(OutPort, f64)>> = vec![None; clusters.len()];
    let mut machines: Vec<MinMachine> = Vec::new();
    let mut tree_id_sets: Vec<HashSet<EdgeId>> = Vec::new();
    for (i, cluster) in clusters.iter().enumerate() {
        tree_id_sets.push(tree_edge_ids(graph, cluster));
        if cluster.size() > n_star {
            continue;
        }
        if cluster.size() == 1 {
            // A singleton's incident edges are all outgoing (the graph is
            // simple), so the answer is known locally for free.
            let v = cluster.root;
            results[i] = (0..graph.degree(v))
                .map(|p| (p, graph.edge_weight(graph.edge_id(v, p))))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .map(|(p, w)| (OutPort { node: v, port: p }, w));
            continue;
        }
        machines.push(MinMachine {
            cluster: i,
            state: MinState::FullRange,
            pending: None,
            probe_seq: 0,
        });
    }
    loop {
        let mut batch: Vec<WalkRequest> = Vec::new();
        let mut owners: Vec<usize> = Vec::new();
        for (mi, machine) in machines.iter_mut().enumerate() {
            let cluster = &clusters[machine.cluster];
            let tree_ids = &tree_id_sets[machine.cluster];
            loop {
                let range = match machine.state {
                    MinState::Done(_) => break,
                    MinState::FullRange => (0usize, m),
                    MinState::Bisect { lo, hi } => {
                        if hi - lo == 1 {
                            // Locate the unique edge of this weight rank.
                            let target = sorted[lo];
                            let found = cluster.members.iter().find_map(|&v| {
                                graph.neighbors(v).find_map(|(p, u)| {
                                    let e = graph.edge_id(v, p);
                                    if graph.edge_weight(e) == target && !cluster.contains(u) {
                                        Some((v, p, u))
                                    } else {
                                        None
                                    }
                                })
                            });
                            machine.state = match found {
                                Some((v, p, u)) => {
                                    ledger.charge_classical(
                                        phase,
                                        [(v, p), (u, graph.inverse_port(v, p))],
                                    );
                                    charge_report(graph, cluster, v, ledger, phase);
                                    MinState::Done(Some((
                                        OutPort { node: v, port: p },
                                        target,
                                    )))
                                }
                                None => MinState::Done(None),
                            };
                            break;
                        }
                        let mid = lo + (hi - lo) / 2;
                        (lo, mid)
                    }
                };
                let probe = Probe {
                    w_lo: weight_at(range.0),
                    w_hi: weight_at(range.1),
                    active: &cluster.members,
                    allow_highdeg: true,
                    prefer_min_weight: true,
                };
                match resolve_probe(graph, cluster, tree_ids, probe, constants, ledger, phase) {
                    Resolution::Found { port, weight, exact_min } => {
                        if exact_min {
                            // Exact minimum of the lower window: nothing to
                            // its left, so it is the global minimum.
                            machine.state = MinState::Done(Some((port, weight)));
                        } else {
                            machine.state = MinState::Bisect { lo: range.0, hi: range.1 };
                        }
                    }
                    Resolution::NoneInRange => match machine.state {
                        MinState::FullRange => machine.state = MinState::Done(None),
                        MinState::Bisect { hi, .. } => {
                            machine.state = MinState::Bisect { lo: range.1, hi };
                        }
                        MinState::Done(_) => unreachable!(),
                    },
                    Resolution::NeedWalk => {
                        machine.probe_seq += 1;
                        let req = make_walk_request(
                            graph,
                            cluster,
                            tree_ids,
                            &probe,
                            machine.probe_seq,
                            delta_walk,
                            constants,
                            &mut audit,
                        );
                        machine.pending = Some(range);
                        batch.push(req);
                        owners.push(mi);
                        break;
                    }
                }
            }
        }
        if batch.is_empty() {
            break;
        }
        let outcomes = schedule_walks(
            &batch,
            ScheduleMode::MarkedShared,
            fidelity,
            constants,
            rng,
            ledger,
            phase,
            None,
        )?;
        for (outcome, &mi) in outcomes.iter().zip(&owners) {
            let machine = &mut machines[mi];
            let (p_lo, p_hi) = machine.pending.take().expect("verdict for a pending probe");
            let nonempty = outcome.verdict == MarkedVerdict::NonEmpty;
            machine.state = match machine.state {
                MinState::FullRange => {
                    if nonempty {
                        MinState::Bisect { lo: p_lo, hi: p_hi }
                    } else {
                        MinState::Done(None)
                    }
                }
                MinState::Bisect { lo, hi } => {
                    debug_assert_eq!(lo, p_lo);
                    if nonempty {
                        MinState::Bisect { lo, hi: p_hi }
                    } else {
                        MinState::Bisect { lo: p_hi, hi }
                    }
                }
                MinState::Done(_) => unreachable!(),
            };
        }
    }
    for machine in machines {
        if let MinState::Done(best) = machine.state {
            results[machine.cluster] = best;
        }
    }
    Ok(results)
}

// ---------------------------------------------------------------------------
// find_any
// ---------------------------------------------------------------------------

enum AnyState {
    /// Initial full-range probe: high-degree resolution, direct probing, or
    /// the first detection walk, in that order.
    FullRange,
    Bisect { lo: u64, hi: u64 },
    Done(Option<OutPort>),
}

struct AnyMachine {
    cluster: usize,
    state: AnyState,
    pending: Option<(u64, u64)>,
    probe_seq: u64,
}

fn active_by_id(cluster: &ClusterState, lo: u64, hi: u64) -> Vec<NodeId> {
    cluster
        .members
        .iter()
        .copied()
        .filter(|v| {
            let id = cluster.info[v].node_id;
            id >= lo && id < hi
        })
        .collect()
}

/// Probes the ports of a located good node ascending until one leads out.
fn good_node_probe(
    graph: &PortedGraph,
    cluster: &ClusterState,
    node: NodeId,
    ledger: &mut MessageLedger,
    phase: &str,
) -> Option<OutPort> {
    let tree_ports: HashSet<Port> = cluster.info[&node]
        .child_ports
        .iter()
        .copied()
        .chain(cluster.info[&node].parent_port)
        .collect();
    let mut probes = 0u64;
    for (p, u) in graph.neighbors(node) {
        if tree_ports.contains(&p) {
            continue;
        }
        probes += 1;
        ledger.charge_classical(phase, [(node, p), (u, graph.inverse_port(node, p))]);
        if !cluster.contains(u) {
            ledger.advance_rounds(phase, 2 * probes);
            charge_report(graph, cluster, node, ledger, phase);
            return Some(OutPort { node, port: p });
        }
    }
    ledger.advance_rounds(phase, 2 * probes);
    None
}

/// Per-cluster outgoing-edge search.
///
/// Phase 1 resolves clusters holding a high-degree node. Phase 2 detects a
/// good node with a full-range walk, then binary-searches the id space
/// `[0, n^3)` with one walk per halving; narrow windows resolve classically
/// through the same ladder as `find_min`.
#[allow(clippy::too_many_arguments)]
pub fn find_any<R: Rng>(
    graph: &PortedGraph,
    clusters: &[ClusterState],
    n_star: usize,
    delta: f64,
    fidelity: Fidelity,
    constants: &RunConstants,
    rng: &mut R,
    ledger: &mut MessageLedger,
    mut audit: Option<&mut Vec<WalkAudit>>,
) -> Result<Vec<Option<OutPort>>, PrimitiveError> {
    let phase = "find_any";
    let id_space = (graph.node_count() as u64).pow(3).max(2);
    let delta_walk = constants.walk_delta(delta);
    let mut results: Vec<Option<OutPort>> = vec![None; clusters.len()];
    let mut machines: Vec<AnyMachine> = Vec::new();
    let mut tree_id_sets: Vec<HashSet<EdgeId>> = Vec::new();
    for (i, cluster) in clusters.iter().enumerate() {
        tree_id_sets.push(tree_edge_ids(graph, cluster));
        if cluster.size() > n_star {
            continue;
        }
        if cluster.size() == 1 {
            let v = cluster.root;
            results[i] =
                (graph.degree(v) > 0).then_some(OutPort { node: v, port: 0 });
            continue;
        }
        machines.push(AnyMachine {
            cluster: i,
            state: AnyState::FullRange,
            pending: None,
            probe_seq: 0,
        });
    }
    loop {
        let mut batch: Vec<WalkRequest> = Vec::new();
        let mut owners: Vec<usize> = Vec::new();
        for (mi, machine) in machines.iter_mut().enumerate() {
            let cluster = &clusters[machine.cluster];
            let tree_ids = &tree_id_sets[machine.cluster];
            loop {
                let (id_range, allow_highdeg, active): ((u64, u64), bool, Vec<NodeId>) =
                    match machine.state {
                        AnyState::Done(_) => break,
                        AnyState::FullRange => ((0, id_space), true, cluster.members.clone()),
                        AnyState::Bisect { lo, hi } => {
                            if hi - lo == 1 {
                                let node = cluster
                                    .members
                                    .iter()
                                    .copied()
                                    .find(|v| cluster.info[v].node_id == lo);
                                machine.state = AnyState::Done(node.and_then(|g| {
                                    good_node_probe(graph, cluster, g, ledger, phase)
                                }));
                                break;
                            }
                            let mid = lo + (hi - lo) / 2;
                            ((lo, mid), false, active_by_id(cluster, lo, mid))
                        }
                    };
                let probe = Probe {
                    w_lo: f64::NEG_INFINITY,
                    w_hi: f64::INFINITY,
                    active: &active,
                    allow_highdeg,
                    prefer_min_weight: false,
                };
                match resolve_probe(graph, cluster, tree_ids, probe, constants, ledger, phase) {
                    Resolution::Found { port, .. } => {
                        machine.state = AnyState::Done(Some(port));
                    }
                    Resolution::NoneInRange => {
                        machine.state = match machine.state {
                            AnyState::FullRange => AnyState::Done(None),
                            AnyState::Bisect { hi, .. } => {
                                AnyState::Bisect { lo: id_range.1, hi }
                            }
                            AnyState::Done(_) => unreachable!(),
                        };
                    }
                    Resolution::NeedWalk => {
                        machine.probe_seq += 1;
                        let req = make_walk_request(
                            graph,
                            cluster,
                            tree_ids,
                            &probe,
                            machine.probe_seq,
                            delta_walk,
                            constants,
                            &mut audit,
                        );
                        machine.pending = Some(id_range);
                        batch.push(req);
                        owners.push(mi);
                        break;
                    }
                }
            }
        }
        if batch.is_empty() {
            break;
        }
        let outcomes = schedule_walks(
            &batch,
            ScheduleMode::MarkedShared,
            fidelity,
            constants,
            rng,
            ledger,
            phase,
            None,
        )?;
        for (outcome, &mi) in outcomes.iter().zip(&owners) {
            let machine = &mut machines[mi];
            let (p_lo, p_hi) = machine.pending.take().expect("verdict for a pending probe");
            let nonempty = outcome.verdict == MarkedVerdict::NonEmpty;
            machine.state = match machine.state {
                AnyState::FullRange => {
                    if nonempty {
                        AnyState::Bisect { lo: p_lo, hi: p_hi }
                    } else {
                        AnyState::Done(None)
                    }
                }
                AnyState::Bisect { lo, hi } => {
                    debug_assert_eq!(lo, p_lo);
                    if nonempty {
                        AnyState::Bisect { lo, hi: p_hi }
                    } else {
                        AnyState::Bisect { lo: p_hi, hi }
                    }
                }
                AnyState::Done(_) => unreachable!(),
            };
        }
    }
    for machine in machines {
        if let AnyState::Done(best) = machine.state {
            results[machine.cluster] = best;
        }
    }
    Ok(results)
}

/// Detection-only variant: does the cluster have any outgoing edge?
/// `None` for clusters larger than `n_star`.
#[allow(clippy::too_many_arguments)]
pub fn has_outgoing<R: Rng>(
    graph: &PortedGraph,
    clusters: &[ClusterState],
    n_star: usize,
    delta: f64,
    fidelity: Fidelity,
    constants: &RunConstants,
    rng: &mut R,
    ledger: &mut MessageLedger,
    mut audit: Option<&mut Vec<WalkAudit>>,
) -> Result<Vec<Option<bool>>, PrimitiveError> {
    let phase = "outgoing_check";
    let delta_walk = constants.walk_delta(delta);
    let mut results: Vec<Option<bool>> = vec![None; clusters.len()];
    let mut batch: Vec<WalkRequest> = Vec::new();
    let mut owners: Vec<usize> = Vec::new();
    for (i, cluster) in clusters.iter().enumerate() {
        if cluster.size() > n_star {
            continue;
        }
        if cluster.size() == 1 {
            results[i] = Some(graph.degree(cluster.root) > 0);
            continue;
        }
        let tree_ids = tree_edge_ids(graph, cluster);
        let probe = Probe {
            w_lo: f64::NEG_INFINITY,
            w_hi: f64::INFINITY,
            active: &cluster.members,
            allow_highdeg: true,
            prefer_min_weight: false,
        };
        match resolve_probe(graph, cluster, &tree_ids, probe, constants, ledger, phase) {
            Resolution::Found { .. } => results[i] = Some(true),
            Resolution::NoneInRange => results[i] = Some(false),
            Resolution::NeedWalk => {
                let req = make_walk_request(
                    graph,
                    cluster,
                    &tree_ids,
                    &probe,
                    u64::MAX,
                    delta_walk,
                    constants,
                    &mut audit,
                );
                batch.push(req);
                owners.push(i);
            }
        }
    }
    if !batch.is_empty() {
        let outcomes = schedule_walks(
            &batch,
            ScheduleMode::MarkedShared,
            fidelity,
            constants,
            rng,
            ledger,
            phase,
            None,
        )?;
        for (outcome, &i) in outcomes.iter().zip(&owners) {
            results[i] = Some(outcome.verdict == MarkedVerdict::NonEmpty);
        }
    }
    Ok(results)
}
