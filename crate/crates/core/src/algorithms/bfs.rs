//! Full BFS tree construction in the outside-in style.
//!
//! Preprocessing builds a `(ceil(log2 n), 1)` sparse cover. Every phase then
//! grows the tree one layer: frontier nodes ping the cover trees they belong
//! to, pinged trees broadcast "close to the frontier", and informed outsiders
//! Grover-search their ports for a tree member to adopt as parent. The
//! neighborhood property of the cover guarantees every next-layer node gets
//! informed, and the cover's depth bound caps how often any single node
//! searches. Phases numbered by powers of two run a convergecast over the
//! partial tree to detect that nothing joined and stop.

use super::cover::{sparse_cover, CoverOutput};
use super::{AlgoError, AlgoOptions};
use crate::graph::{NodeId, Port, PortedGraph};
use crate::primitives::{distributed_grover, GroverTask, WalkAudit};
use crate::sim::MessageLedger;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;

/// Per-node BFS tree output.
#[derive(Debug, Clone, Serialize)]
pub struct BfsOutput {
    pub root: NodeId,
    pub layers: Vec<Option<u32>>,
    pub parent_port: Vec<Option<Port>>,
    pub child_ports: Vec<Vec<Port>>,
    /// Grover searches each node executed (the cover keeps this logarithmic).
    pub searches_per_node: Vec<u32>,
}

impl BfsOutput {
    /// Layer function sanity: adjacent layers differ by at most one and the
    /// parent sits one layer up.
    pub fn check_structure(&self, graph: &PortedGraph) -> bool {
        for v in 0..graph.node_count() {
            let Some(lv) = self.layers[v] else { return false };
            for (_, u) in graph.neighbors(v) {
                let Some(lu) = self.layers[u] else { return false };
                if lv.abs_diff(lu) > 1 {
                    return false;
                }
            }
            if let Some(p) = self.parent_port[v] {
                let u = graph.neighbor(v, p);
                if self.layers[u] != Some(lv - 1) {
                    return false;
                }
            } else if v != self.root {
                return false;
            }
        }
        true
    }
}

/// BFS from `root`. Returns the tree, the ledger, the cover audits the run
/// was built on, and walk audits (none: BFS uses no walks — kept for
/// interface symmetry with the other algorithms).
pub fn bfs(
    graph: &PortedGraph,
    root: NodeId,
    options: &AlgoOptions,
) -> Result<(BfsOutput, CoverOutput, MessageLedger, Vec<WalkAudit>), AlgoError> {
    let n = graph.node_count();
    let mut ledger = options.ledger();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let alpha = options.constants.walk_delta(options.delta);
    let kappa = (n.max(2) as f64).log2().ceil() as u32;
    let cover = sparse_cover(
        graph,
        kappa,
        1,
        alpha,
        &options.constants,
        &mut rng,
        &mut ledger,
    )?;
    let tree_members: Vec<BTreeSet<NodeId>> = cover
        .trees
        .iter()
        .map(|t| t.members.keys().copied().collect())
        .collect();
    let trees_of: Vec<Vec<usize>> = {
        let mut per_node = vec![Vec::new(); n];
        for (ti, members) in tree_members.iter().enumerate() {
            for &v in members {
                per_node[v].push(ti);
            }
        }
        per_node
    };

    let mut layers: Vec<Option<u32>> = vec![None; n];
    let mut parent_port: Vec<Option<Port>> = vec![None; n];
    let mut searches = vec![0u32; n];
    layers[root] = Some(0);
    let mut frontier: Vec<NodeId> = vec![root];
    let mut joined_last_phase = 1usize;
    let ping_rounds =
        (options.constants.ping_round_c1 * (n.max(2) as f64).log2().powi(3)).ceil() as u64;
    let phase_cap = 4 * n as u64 + 8;
    let mut phase = 1u64;
    loop {
        if phase > phase_cap {
            return Err(AlgoError::PhaseCapExceeded);
        }
        if phase.is_power_of_two() && phase > 1 {
            // Termination subphase: convergecast + broadcast over the tree.
            let tree_size = layers.iter().flatten().count() as u64;
            let mut msgs = Vec::new();
            for v in 0..n {
                if let Some(p) = parent_port[v] {
                    msgs.push((v, p));
                    let u = graph.neighbor(v, p);
                    msgs.push((u, graph.inverse_port(v, p)));
                }
            }
            ledger.charge_classical("bfs_termination", msgs);
            ledger.advance_rounds("bfs_termination", 2 * tree_size.max(1));
            if joined_last_phase == 0 {
                break;
            }
        }
        // Ping subphase: frontier members ping their cover trees; pinged
        // trees broadcast. Ping paths within one tree merge.
        let mut pinged: BTreeSet<usize> = BTreeSet::new();
        for &v in &frontier {
            for &t in &trees_of[v] {
                pinged.insert(t);
            }
        }
        let mut informed: BTreeSet<NodeId> = BTreeSet::new();
        let mut ping_msgs: Vec<(NodeId, Port)> = Vec::new();
        for &t in &pinged {
            let tree = &cover.trees[t];
            let mut on_path: BTreeSet<NodeId> = BTreeSet::new();
            for &v in &frontier {
                if !tree.members.contains_key(&v) {
                    continue;
                }
                let mut x = v;
                while let (true, Some(p)) = (on_path.insert(x), tree.members[&x].1) {
                    ping_msgs.push((x, p));
                    x = graph.neighbor(x, p);
                }
            }
            // Tree broadcast to inform each member.
            for (&v, &(_, parent)) in &tree.members {
                informed.insert(v);
                if let Some(p) = parent {
                    let u = graph.neighbor(v, p);
                    ping_msgs.push((u, graph.inverse_port(v, p)));
                }
            }
        }
        ledger.charge_classical("bfs_ping", ping_msgs);
        ledger.advance_rounds("bfs_ping", ping_rounds);
        // Grover subphase: informed outsiders search for a tree member.
        let mut joined_now: Vec<(NodeId, Port, u32)> = Vec::new();
        for &v in &informed {
            if layers[v].is_some() || graph.degree(v) == 0 {
                continue;
            }
            let pred = |p: Port| layers[graph.neighbor(v, p)].is_some();
            let task =
                GroverTask::over_ports(v, graph.degree(v), &pred, alpha, &options.constants);
            searches[v] += 1;
            let outcome =
                distributed_grover(&task, &options.constants, &mut rng, &mut ledger, "bfs_grover")?;
            if let Some(p) = outcome.found {
                let u = graph.neighbor(v, p);
                joined_now.push((v, p, layers[u].unwrap() + 1));
            }
        }
        frontier = Vec::new();
        joined_last_phase = joined_now.len();
        for (v, p, layer) in joined_now {
            layers[v] = Some(layer);
            parent_port[v] = Some(p);
            frontier.push(v);
        }
        phase += 1;
    }
    if layers.iter().any(|l| l.is_none()) {
        return Err(AlgoError::Disconnected {
            fragments: layers.iter().filter(|l| l.is_none()).count() + 1,
        });
    }
    let mut child_ports: Vec<Vec<Port>> = vec![Vec::new(); n];
    for v in 0..n {
        if let Some(p) = parent_port[v] {
            let u = graph.neighbor(v, p);
            child_ports[u].push(graph.inverse_port(v, p));
        }
    }
    for c in &mut child_ports {
        c.sort_unstable();
    }
    let output = BfsOutput {
        root,
        layers,
        parent_port,
        child_ports,
        searches_per_node: searches,
    };
    Ok((output, cover, ledger, Vec::new()))
}
