//! Distributed building blocks: cluster trees, convergecast and broadcast,
//! Grover search over a node's ports, and the outgoing-edge primitives.

pub mod grover;
pub mod outgoing;

pub use grover::{distributed_grover, GroverOutcome, GroverTask};
pub use outgoing::{find_any, find_min, has_outgoing, OutPort, WalkAudit};

use crate::graph::{NodeId, Port, PortedGraph};
use crate::sim::MessageLedger;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrimitiveError {
    #[error("cluster {0}: {1}")]
    InconsistentCluster(u64, String),
    #[error("edge weights are not pairwise distinct (weight {0})")]
    DuplicateWeights(f64),
    #[error("grover: {0}")]
    Grover(String),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

/// Per-member tree bookkeeping inside a cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberInfo {
    pub parent_port: Option<Port>,
    pub child_ports: Vec<Port>,
    pub depth: u32,
    /// Random id drawn from `[0, n^3)`; collision-free with high probability.
    pub node_id: u64,
}

/// A cluster: a node set spanned by a tree, with the root's random id as the
/// cluster id.
#[derive(Debug, Clone)]
pub struct ClusterState {
    pub id: u64,
    pub root: NodeId,
    pub members: Vec<NodeId>,
    pub info: BTreeMap<NodeId, MemberInfo>,
}

impl ClusterState {
    /// Builds the cluster from an undirected tree adjacency over `members`,
    /// orienting everything away from `root`. Rejects cyclic or disconnected
    /// "trees".
    pub fn build(
        graph: &PortedGraph,
        root: NodeId,
        tree_adj: &BTreeMap<NodeId, Vec<NodeId>>,
        node_ids: &BTreeMap<NodeId, u64>,
    ) -> Result<ClusterState, PrimitiveError> {
        let id = node_ids[&root];
        let mut info: BTreeMap<NodeId, MemberInfo> = BTreeMap::new();
        info.insert(
            root,
            MemberInfo { parent_port: None, child_ports: Vec::new(), depth: 0, node_id: id },
        );
        let mut queue = std::collections::VecDeque::from([root]);
        let mut edges_seen = 0usize;
        while let Some(v) = queue.pop_front() {
            let depth = info[&v].depth;
            if depth as usize > tree_adj.len() {
                return Err(PrimitiveError::InconsistentCluster(
                    id,
                    "depth exceeds member count; tree is malformed".into(),
                ));
            }
            let nbrs = tree_adj.get(&v).cloned().unwrap_or_default();
            for u in nbrs {
                if info.contains_key(&u) {
                    continue;
                }
                edges_seen += 1;
                let to_child = graph.port_to(v, u).ok_or_else(|| {
                    PrimitiveError::InconsistentCluster(id, format!("tree edge ({v},{u}) missing"))
                })?;
                let to_parent = graph.inverse_port(v, to_child);
                info.get_mut(&v).unwrap().child_ports.push(to_child);
                info.insert(
                    u,
                    MemberInfo {
                        parent_port: Some(to_parent),
                        child_ports: Vec::new(),
                        depth: depth + 1,
                        node_id: node_ids[&u],
                    },
                );
                queue.push_back(u);
            }
        }
        let degree_sum: usize = tree_adj.values().map(|v| v.len()).sum();
        if edges_seen + 1 != info.len()
            || degree_sum != 2 * (info.len().saturating_sub(1))
            || tree_adj.keys().any(|v| !info.contains_key(v))
        {
            return Err(PrimitiveError::InconsistentCluster(
                id,
                "tree adjacency is cyclic or disconnected".into(),
            ));
        }
        let members: Vec<NodeId> = info.keys().copied().collect();
        Ok(ClusterState { id, root, members, info })
    }

    /// Singleton cluster.
    pub fn singleton(node: NodeId, node_id: u64) -> ClusterState {
        let mut info = BTreeMap::new();
        info.insert(
            node,
            MemberInfo { parent_port: None, child_ports: Vec::new(), depth: 0, node_id },
        );
        ClusterState { id: node_id, root: node, members: vec![node], info }
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn tree_depth(&self) -> u32 {
        self.info.values().map(|m| m.depth).max().unwrap_or(0)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.info.contains_key(&v)
    }

    /// Tree-edge message list child -> parent, one per non-root member.
    fn upward_messages(&self) -> Vec<(NodeId, Port)> {
        self.members
            .iter()
            .filter_map(|&v| self.info[&v].parent_port.map(|p| (v, p)))
            .collect()
    }

    /// Tree-edge message list parent -> child, one per non-root member.
    fn downward_messages(&self) -> Vec<(NodeId, Port)> {
        let mut out = Vec::new();
        for &v in &self.members {
            for &p in &self.info[&v].child_ports {
                out.push((v, p));
            }
        }
        out
    }

    /// Checks parent/child port consistency against the graph and that the
    /// root is the unique parentless member.
    pub fn validate(&self, graph: &PortedGraph) -> Result<(), PrimitiveError> {
        let mut roots = 0;
        for (&v, info) in &self.info {
            match info.parent_port {
                None => roots += 1,
                Some(p) => {
                    let parent = graph.neighbor(v, p);
                    if !self.contains(parent) {
                        return Err(PrimitiveError::InconsistentCluster(
                            self.id,
                            format!("parent of {v} is outside the cluster"),
                        ));
                    }
                    let back = graph.inverse_port(v, p);
                    if !self.info[&parent].child_ports.contains(&back) {
                        return Err(PrimitiveError::InconsistentCluster(
                            self.id,
                            format!("parent of {v} does not list it as a child"),
                        ));
                    }
                }
            }
        }
        if roots != 1 {
            return Err(PrimitiveError::InconsistentCluster(
                self.id,
                format!("{roots} parentless members"),
            ));
        }
        if self.members.len() != self.info.len() {
            return Err(PrimitiveError::InconsistentCluster(
                self.id,
                "member list mismatch".into(),
            ));
        }
        Ok(())
    }
}

/// Convergecast of a `(value, tie)` minimum over the cluster tree: the root
/// learns the minimum, ties broken by the tie field (node ids in practice).
/// Costs exactly `n_i - 1` messages and `depth` rounds: every non-root member
/// sends one message to its parent after hearing from all children.
pub fn convergecast_min(
    cluster: &ClusterState,
    values: &BTreeMap<NodeId, (u64, u64)>,
    ledger: &mut MessageLedger,
    phase: &str,
) -> (u64, u64) {
    let best = cluster.members.iter().map(|v| values[v]).min().expect("cluster is nonempty");
    ledger.charge_classical(phase, cluster.upward_messages());
    ledger.advance_rounds(phase, cluster.tree_depth() as u64);
    best
}

/// Broadcast over the cluster tree: `n_i - 1` messages, `depth` rounds.
pub fn broadcast(cluster: &ClusterState, ledger: &mut MessageLedger, phase: &str) {
    ledger.charge_classical(phase, cluster.downward_messages());
    ledger.advance_rounds(phase, cluster.tree_depth() as u64);
}
