//! Fragment-merging MST, and with it leader election, spanning tree, and
//! broadcast.
//!
//! The algorithm runs phases with exponentially growing size estimates
//! `n* = 2^i`. Within a phase, subphases repeat: every fragment of size at
//! most `n*` computes its minimum-weight outgoing edge (`find_min`),
//! fragments exchange root ids over the chosen edges (the higher id becomes
//! the component root), and each connected component of the fragment graph
//! merges — unless the merged size would exceed `n*`, in which case the
//! attempt is rolled back and the fragments stay separate until the estimate
//! grows. A fragment whose search finds no outgoing edge spans its component
//! and terminates.
//!
//! A fragment's minimum outgoing edge stays valid while the fragment itself
//! is unchanged (weights are static and other fragments merging cannot make
//! the edge internal), so results are cached across subphases and phases and
//! recomputed only after a merge.

use super::{distinct_ids, AlgoError, AlgoOptions};
use crate::graph::{EdgeId, NodeId, Port, PortedGraph};
use crate::primitives::{find_min, ClusterState, OutPort, WalkAudit};
use crate::sim::{Fidelity, MessageLedger};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TreeRole {
    Parent,
    Child,
}

/// Per-node view of the constructed tree.
#[derive(Debug, Clone, Serialize)]
pub struct MstOutput {
    /// For each node, its tree ports tagged parent/child.
    pub roles: Vec<Vec<(Port, TreeRole)>>,
    /// Sorted tree edge ids.
    pub edges: Vec<EdgeId>,
    /// Root of the final fragment (the elected leader).
    pub leader: NodeId,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeaderOutput {
    /// Exactly one elected node per connected component.
    pub elected: Vec<NodeId>,
    /// Per-component tree edges (sorted within each component).
    pub component_edges: Vec<Vec<EdgeId>>,
}

pub struct GhsRun {
    pub fragments: Vec<ClusterState>,
    pub ledger: MessageLedger,
    pub audits: Vec<WalkAudit>,
    pub fidelity: Fidelity,
    /// With `collect_audits`: the union of fragment tree edges after every
    /// subphase, for the subtree-of-the-MST invariant.
    pub tree_snapshots: Vec<Vec<EdgeId>>,
}

struct Fragment {
    cluster: ClusterState,
    adj: BTreeMap<NodeId, Vec<NodeId>>,
    /// `None`: unknown; `Some(x)`: cached `find_min` answer.
    mwoe: Option<Option<(OutPort, f64)>>,
    done: bool,
}

/// Graph with unique weights for the merge order: the input's weights when
/// present (checked unique downstream), otherwise canonical distinct weights
/// from edge ids.
fn ensure_weighted(graph: &PortedGraph) -> Result<PortedGraph, AlgoError> {
    if graph.is_weighted() {
        return Ok(graph.clone());
    }
    let weights: Vec<f64> = (0..graph.edge_count()).map(|e| (e + 1) as f64).collect();
    Ok(PortedGraph::from_edge_list(graph.node_count(), graph.edges(), Some(&weights))?)
}

/// Runs the fragment-merging engine to completion: every final fragment
/// spans one connected component.
pub fn run_ghs(graph: &PortedGraph, options: &AlgoOptions) -> Result<GhsRun, AlgoError> {
    let weighted = ensure_weighted(graph)?;
    let n = weighted.node_count();
    let fidelity = options.resolve_fidelity(n, weighted.edge_count())?;
    let mut ledger = options.ledger();
    let mut audits: Vec<WalkAudit> = Vec::new();
    let mut tree_snapshots: Vec<Vec<EdgeId>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    if n == 0 {
        return Ok(GhsRun {
            fragments: Vec::new(),
            ledger,
            audits,
            fidelity,
            tree_snapshots,
        });
    }
    let id_space = (n as u64).pow(3).max(2);
    let ids = distinct_ids(n, id_space, &mut rng);
    let node_ids: BTreeMap<NodeId, u64> = (0..n).map(|v| (v, ids[v])).collect();

    let mut frags: Vec<Option<Fragment>> = (0..n)
        .map(|v| {
            Some(Fragment {
                cluster: ClusterState::singleton(v, node_ids[&v]),
                adj: BTreeMap::from([(v, Vec::new())]),
                mwoe: None,
                done: false,
            })
        })
        .collect();
    let mut frag_of: Vec<usize> = (0..n).collect();

    let phase_cap = (n.max(2) as f64).log2().ceil() as u32 + 2;
    let mut finished = false;
    for phase in 1..=phase_cap {
        let n_star = 1usize << phase.min(62);
        let subphase_cap = phase + 1;
        for _sub in 0..subphase_cap {
            // Recompute missing outgoing edges for active fragments.
            let mut to_compute: Vec<usize> = Vec::new();
            for (fi, frag) in frags.iter().enumerate() {
                if let Some(f) = frag {
                    if !f.done && f.cluster.size() <= n_star && f.mwoe.is_none() {
                        to_compute.push(fi);
                    }
                }
            }
            if !to_compute.is_empty() {
                let clusters: Vec<ClusterState> = to_compute
                    .iter()
                    .map(|&fi| frags[fi].as_ref().unwrap().cluster.clone())
                    .collect();
                let found = find_min(
                    &weighted,
                    &clusters,
                    n_star,
                    options.delta,
                    fidelity,
                    &options.constants,
                    &mut rng,
                    &mut ledger,
                    options.collect_audits.then_some(&mut audits),
                )?;
                for (&fi, result) in to_compute.iter().zip(found) {
                    let frag = frags[fi].as_mut().unwrap();
                    frag.mwoe = Some(result);
                    if result.is_none() {
                        // No outgoing edge: the fragment spans its component.
                        frag.done = true;
                    }
                }
            }
            // Root-id exchange over the chosen edges.
            let mut merge_edges: Vec<(usize, usize, OutPort)> = Vec::new();
            for (fi, frag) in frags.iter().enumerate() {
                let Some(f) = frag else { continue };
                if f.done || f.cluster.size() > n_star {
                    continue;
                }
                if let Some(Some((port, _))) = f.mwoe {
                    let target = frag_of[weighted.neighbor(port.node, port.port)];
                    merge_edges.push((fi, target, port));
                }
            }
            for &(fi, _, port) in &merge_edges {
                let f = frags[fi].as_ref().unwrap();
                let mut msgs: Vec<(NodeId, Port)> = f
                    .cluster
                    .members
                    .iter()
                    .flat_map(|&v| {
                        f.cluster.info[&v].child_ports.iter().map(move |&p| (v, p))
                    })
                    .collect();
                msgs.push((port.node, port.port));
                let rounds = f.cluster.tree_depth() as u64 + 1;
                ledger.charge_classical("mst_exchange", msgs);
                ledger.advance_rounds("mst_exchange", rounds);
            }
            // Components of the fragment graph, merged or aborted whole.
            let mut comp_of: BTreeMap<usize, usize> = BTreeMap::new();
            let mut comps: Vec<Vec<usize>> = Vec::new();
            {
                let mut und: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
                for &(a, b, _) in &merge_edges {
                    und.entry(a).or_default().insert(b);
                    und.entry(b).or_default().insert(a);
                }
                for &start in und.keys() {
                    if comp_of.contains_key(&start) {
                        continue;
                    }
                    let ci = comps.len();
                    let mut stack = vec![start];
                    let mut comp = Vec::new();
                    comp_of.insert(start, ci);
                    while let Some(x) = stack.pop() {
                        comp.push(x);
                        for &y in und.get(&x).into_iter().flatten() {
                            if let std::collections::btree_map::Entry::Vacant(e) = comp_of.entry(y) {
                                e.insert(ci);
                                stack.push(y);
                            }
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
            let mut progressed = false;
            for comp in comps {
                let total: usize = comp
                    .iter()
                    .map(|&fi| frags[fi].as_ref().unwrap().cluster.size())
                    .sum();
                // Component root: the higher cluster id of a mutual pair, or
                // the unique sink fragment that chose no edge this subphase.
                let chooser: HashSet<usize> = merge_edges
                    .iter()
                    .filter(|(a, _, _)| comp.contains(a))
                    .map(|&(a, _, _)| a)
                    .collect();
                let mut root_frag = None;
                for &(a, b, port) in &merge_edges {
                    if !comp.contains(&a) {
                        continue;
                    }
                    if let Some(&(_, _, back)) =
                        merge_edges.iter().find(|&&(x, y, _)| x == b && y == a)
                    {
                        let e = weighted.edge_id(port.node, port.port);
                        let e2 = weighted.edge_id(back.node, back.port);
                        if e == e2 {
                            let ida = frags[a].as_ref().unwrap().cluster.id;
                            let idb = frags[b].as_ref().unwrap().cluster.id;
                            // The two roots learned each other's id over the
                            // shared edge.
                            ledger.charge_classical(
                                "mst_exchange",
                                [
                                    (port.node, port.port),
                                    (back.node, back.port),
                                ],
                            );
                            root_frag = Some(if ida > idb { a } else { b });
                            break;
                        }
                    }
                }
                let root_frag = root_frag
                    .or_else(|| comp.iter().copied().find(|fi| !chooser.contains(fi)))
                    .unwrap_or(comp[0]);
                if total > (options.constants.merge_abort_factor * n_star as f64) as usize {
                    // Abort: the attempt reaches fragments in breadth order
                    // from the root until the round budget runs out, then
                    // unwinds. Both directions are charged.
                    let mut acc = 0usize;
                    for &fi in &comp {
                        let f = frags[fi].as_ref().unwrap();
                        acc += f.cluster.size();
                        let down: Vec<(NodeId, Port)> = f
                            .cluster
                            .members
                            .iter()
                            .flat_map(|&v| {
                                f.cluster.info[&v].child_ports.iter().map(move |&p| (v, p))
                            })
                            .collect();
                        let up: Vec<(NodeId, Port)> = f
                            .cluster
                            .members
                            .iter()
                            .filter_map(|&v| f.cluster.info[&v].parent_port.map(|p| (v, p)))
                            .collect();
                        ledger.charge_classical("mst_merge_abort", down);
                        ledger.charge_classical("mst_merge_abort", up);
                        if acc > n_star {
                            break;
                        }
                    }
                    ledger.advance_rounds("mst_merge_abort", 2 * n_star.min(total) as u64);
                    continue;
                }
                // Merge the whole component into one fragment.
                let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
                let mut members: Vec<NodeId> = Vec::new();
                let mut edge_seen: HashSet<EdgeId> = HashSet::new();
                for &fi in &comp {
                    let f = frags[fi].as_ref().unwrap();
                    for (&v, list) in &f.adj {
                        adj.entry(v).or_default().extend(list.iter().copied());
                    }
                    members.extend(f.cluster.members.iter().copied());
                    let down: Vec<(NodeId, Port)> = f
                        .cluster
                        .members
                        .iter()
                        .flat_map(|&v| {
                            f.cluster.info[&v].child_ports.iter().map(move |&p| (v, p))
                        })
                        .collect();
                    ledger.charge_classical("mst_merge", down);
                }
                for &(a, _, port) in &merge_edges {
                    if !comp.contains(&a) {
                        continue;
                    }
                    let u = port.node;
                    let v = weighted.neighbor(port.node, port.port);
                    let e = weighted.edge_id(port.node, port.port);
                    if edge_seen.insert(e) {
                        adj.entry(u).or_default().push(v);
                        adj.entry(v).or_default().push(u);
                        ledger.charge_classical("mst_merge", [(u, port.port)]);
                    }
                }
                ledger.advance_rounds("mst_merge", 2 * total as u64);
                let new_root = frags[root_frag].as_ref().unwrap().cluster.root;
                let cluster = ClusterState::build(&weighted, new_root, &adj, &node_ids)?;
                let slot = root_frag;
                for &fi in &comp {
                    if fi != slot {
                        frags[fi] = None;
                    }
                }
                for &v in &cluster.members {
                    frag_of[v] = slot;
                }
                frags[slot] = Some(Fragment { cluster, adj, mwoe: None, done: false });
                progressed = true;
            }
            if options.collect_audits {
                let mut snapshot: Vec<EdgeId> = frags
                    .iter()
                    .flatten()
                    .flat_map(|f| edges_of(&weighted, &f.cluster))
                    .collect();
                snapshot.sort_unstable();
                tree_snapshots.push(snapshot);
            }
            if !progressed {
                break;
            }
        }
        finished = frags
            .iter()
            .flatten()
            .all(|f| f.done);
        if finished {
            break;
        }
    }
    if !finished {
        return Err(AlgoError::PhaseCapExceeded);
    }
    let fragments: Vec<ClusterState> =
        frags.into_iter().flatten().map(|f| f.cluster).collect();
    Ok(GhsRun { fragments, ledger, audits, fidelity, tree_snapshots })
}

fn roles_from(graph: &PortedGraph, fragments: &[ClusterState]) -> Vec<Vec<(Port, TreeRole)>> {
    let mut roles: Vec<Vec<(Port, TreeRole)>> = vec![Vec::new(); graph.node_count()];
    for cluster in fragments {
        for (&v, info) in &cluster.info {
            if let Some(p) = info.parent_port {
                roles[v].push((p, TreeRole::Parent));
            }
            for &p in &info.child_ports {
                roles[v].push((p, TreeRole::Child));
            }
        }
    }
    for r in &mut roles {
        r.sort_unstable_by_key(|x| x.0);
    }
    roles
}

fn edges_of(graph: &PortedGraph, cluster: &ClusterState) -> Vec<EdgeId> {
    let mut out: Vec<EdgeId> = cluster
        .members
        .iter()
        .filter_map(|&v| cluster.info[&v].parent_port.map(|p| graph.edge_id(v, p)))
        .collect();
    out.sort_unstable();
    out
}

/// Minimum spanning tree of a connected weighted graph.
///
/// With probability at least `1 - delta` the output equals the unique MST.
/// Disconnected inputs are detected (several spanning fragments remain once
/// the size estimate covers the graph) and reported.
pub fn mst(
    graph: &PortedGraph,
    options: &AlgoOptions,
) -> Result<(MstOutput, MessageLedger, Vec<WalkAudit>), AlgoError> {
    let run = run_ghs(graph, options)?;
    if run.fragments.len() != 1 {
        return Err(AlgoError::Disconnected { fragments: run.fragments.len() });
    }
    let output = MstOutput {
        roles: roles_from(graph, &run.fragments),
        edges: edges_of(graph, &run.fragments[0]),
        leader: run.fragments[0].root,
    };
    Ok((output, run.ledger, run.audits))
}

/// Leader election: exactly one node per connected component ends elected
/// (the final fragment root).
pub fn leader_election(
    graph: &PortedGraph,
    options: &AlgoOptions,
) -> Result<(LeaderOutput, MessageLedger), AlgoError> {
    let run = run_ghs(graph, options)?;
    let mut elected: Vec<NodeId> = run.fragments.iter().map(|c| c.root).collect();
    elected.sort_unstable();
    let component_edges = run.fragments.iter().map(|c| edges_of(graph, c)).collect();
    Ok((LeaderOutput { elected, component_edges }, run.ledger))
}

/// Broadcast via a constructed spanning tree: `n - 1` extra messages on top
/// of the tree construction.
pub fn broadcast_via_st(
    graph: &PortedGraph,
    source: NodeId,
    options: &AlgoOptions,
) -> Result<(Vec<bool>, MessageLedger), AlgoError> {
    let run = run_ghs(graph, options)?;
    let mut ledger = run.ledger;
    let mut reached = vec![false; graph.node_count()];
    for cluster in &run.fragments {
        if !cluster.contains(source) {
            continue;
        }
        // Tree adjacency, then flood outwards from the source.
        let mut adj: BTreeMap<NodeId, Vec<(NodeId, Port)>> = BTreeMap::new();
        for (&v, info) in &cluster.info {
            if let Some(p) = info.parent_port {
                let parent = graph.neighbor(v, p);
                adj.entry(v).or_default().push((parent, p));
                adj.entry(parent).or_default().push((v, graph.inverse_port(v, p)));
            }
        }
        let mut msgs = Vec::new();
        let mut queue = std::collections::VecDeque::from([source]);
        reached[source] = true;
        let mut rounds = 0u64;
        while let Some(v) = queue.pop_front() {
            for &(u, p) in adj.get(&v).into_iter().flatten() {
                if !reached[u] {
                    reached[u] = true;
                    msgs.push((v, p));
                    queue.push_back(u);
                }
            }
            rounds += 1;
        }
        ledger.charge_classical("broadcast", msgs);
        ledger.advance_rounds("broadcast", rounds);
    }
    Ok((reached, ledger))
}
