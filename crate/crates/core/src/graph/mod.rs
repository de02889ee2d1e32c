//! Port-numbered graphs.
//!
//! A [`PortedGraph`] is an undirected simple graph in which every node `v`
//! numbers its incident edges with ports `0..deg(v)` (adjacency arrays).
//! Ports are the only way nodes address each other: node `v` knows that port
//! `p` leads *somewhere*, and learns the endpoint only by communicating.
//! Each port additionally records the inverse port, i.e. the position of `v`
//! in the other endpoint's adjacency array.
//!
//! Ports are assigned in edge-insertion order; the generators in
//! [`generate`] shuffle port orders under an explicit seed so that
//! hard-instance families vary only in their port encodings.

pub mod fileio;
pub mod generate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node identifier, `0..n`.
pub type NodeId = usize;
/// Port index, `0..deg(v)` local to a node.
pub type Port = usize;
/// Edge identifier in insertion order, `0..m`.
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct PortEntry {
    neighbor: NodeId,
    inverse: Port,
    edge: EdgeId,
}

/// Undirected simple graph with per-node port arrays and optional weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PortedGraph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    weights: Option<Vec<f64>>,
    ports: Vec<Vec<PortEntry>>,
}

/// Construction errors for [`PortedGraph::from_edge_list`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(NodeId, NodeId, usize),
    #[error("edge ({0}, {1}) has non-positive weight {2}")]
    NonPositiveWeight(NodeId, NodeId, f64),
    #[error("{0} edges but {1} weights")]
    WeightCountMismatch(usize, usize),
}

/// One invariant violation reported by [`PortedGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PortSymmetry { node: NodeId, port: Port },
    SelfLoop { node: NodeId, port: Port },
    DuplicateNeighbor { node: NodeId, neighbor: NodeId },
    WeightPositivity { edge: EdgeId, weight: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::PortSymmetry { node, port } => {
                write!(f, "port symmetry broken at node {node} port {port}")
            }
            Violation::SelfLoop { node, port } => {
                write!(f, "self-loop at node {node} port {port}")
            }
            Violation::DuplicateNeighbor { node, neighbor } => {
                write!(f, "node {node} lists neighbor {neighbor} more than once")
            }
            Violation::WeightPositivity { edge, weight } => {
                // Weight symmetry itself holds by construction: both
                // directions read one shared per-edge value.
                write!(f, "edge {edge} has non-positive weight {weight}")
            }
        }
    }
}

impl PortedGraph {
    /// Builds a graph from an edge list, assigning ports in input order.
    pub fn from_edge_list(
        n: usize,
        edges: &[(NodeId, NodeId)],
        weights: Option<&[f64]>,
    ) -> Result<PortedGraph, GraphError> {
        if let Some(w) = weights {
            if w.len() != edges.len() {
                return Err(GraphError::WeightCountMismatch(edges.len(), w.len()));
            }
        }
        let mut ports: Vec<Vec<PortEntry>> = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            if let Some(w) = weights {
                if w[id] <= 0.0 {
                    return Err(GraphError::NonPositiveWeight(u, v, w[id]));
                }
            }
            let pu = ports[u].len();
            let pv = ports[v].len();
            ports[u].push(PortEntry { neighbor: v, inverse: pv, edge: id });
            ports[v].push(PortEntry { neighbor: u, inverse: pu, edge: id });
        }
        Ok(PortedGraph {
            n,
            edges: edges.to_vec(),
            weights: weights.map(|w| w.to_vec()),
            ports,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.ports[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// The neighbor reached from `v` through port `p`.
    pub fn neighbor(&self, v: NodeId, p: Port) -> NodeId {
        self.ports[v][p].neighbor
    }

    /// The port on the other endpoint that leads back to `v`.
    pub fn inverse_port(&self, v: NodeId, p: Port) -> Port {
        self.ports[v][p].inverse
    }

    pub fn edge_id(&self, v: NodeId, p: Port) -> EdgeId {
        self.ports[v][p].edge
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge_weight(&self, e: EdgeId) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[e])
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Iterator over `(port, neighbor)` pairs of `v` in port order.
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (Port, NodeId)> + '_ {
        self.ports[v].iter().enumerate().map(|(p, e)| (p, e.neighbor))
    }

    /// The port of `v` leading to `u`, if the edge exists.
    pub fn port_to(&self, v: NodeId, u: NodeId) -> Option<Port> {
        self.ports[v].iter().position(|e| e.neighbor == u)
    }

    /// The full adjacency-array encoding: `f_v(p)` for every node and port.
    /// Two graphs with the same structure but different port orders differ
    /// exactly here.
    pub fn adjacency_arrays(&self) -> Vec<Vec<NodeId>> {
        self.ports
            .iter()
            .map(|row| row.iter().map(|e| e.neighbor).collect())
            .collect()
    }

    /// Checks every structural invariant and reports each violation.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in 0..self.n {
            let mut seen = std::collections::HashSet::new();
            for (p, entry) in self.ports[v].iter().enumerate() {
                if entry.neighbor == v {
                    out.push(Violation::SelfLoop { node: v, port: p });
                    continue;
                }
                if !seen.insert(entry.neighbor) {
                    out.push(Violation::DuplicateNeighbor { node: v, neighbor: entry.neighbor });
                }
                let u = entry.neighbor;
                let q = entry.inverse;
                if q >= self.ports[u].len() || self.ports[u][q].neighbor != v {
                    out.push(Violation::PortSymmetry { node: v, port: p });
                }
            }
        }
        if let Some(w) = &self.weights {
            for (e, &we) in w.iter().enumerate() {
                if we <= 0.0 || !we.is_finite() {
                    out.push(Violation::WeightPositivity { edge: e, weight: we });
                }
            }
        }
        out
    }

    /// Overwrites the target of one port. Used by the hard-instance
    /// generators that rewrite adjacency arrays in place; the caller is
    /// responsible for restoring symmetry across all rewritten entries.
    pub(crate) fn rewrite_port(&mut self, v: NodeId, p: Port, neighbor: NodeId, inverse: Port) {
        self.ports[v][p].neighbor = neighbor;
        self.ports[v][p].inverse = inverse;
    }

    /// Randomly permutes every node's port array, fixing inverse ports up.
    pub(crate) fn shuffle_ports<R: rand::Rng>(&mut self, rng: &mut R) {
        use rand::seq::SliceRandom;
        for v in 0..self.n {
            let mut order: Vec<usize> = (0..self.ports[v].len()).collect();
            order.shuffle(rng);
            let old = self.ports[v].clone();
            for (new_p, &old_p) in order.iter().enumerate() {
                self.ports[v][new_p] = old[old_p];
            }
            // Fix up the inverse entries on the other endpoints.
            for (new_p, entry) in self.ports[v].clone().iter().enumerate() {
                let u = entry.neighbor;
                let q = entry.inverse;
                self.ports[u][q].inverse = new_p;
            }
        }
    }

    /// Stable content hash of the encoding (structure, port order, weights).
    pub fn content_hash(&self) -> u64 {
        // FNV-1a over a canonical byte stream.
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(&(self.n as u64).to_le_bytes());
        for v in 0..self.n {
            for e in &self.ports[v] {
                eat(&(e.neighbor as u64).to_le_bytes());
            }
            eat(&u64::MAX.to_le_bytes());
        }
        if let Some(w) = &self.weights {
            for x in w {
                eat(&x.to_bits().to_le_bytes());
            }
        }
        h
    }

    /// Connected component containing `start` (by edge traversal).
    pub fn component_of(&self, start: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        let mut out = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            out.push(v);
            for (_, u) in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.component_of(0).len() == self.n
    }
}
