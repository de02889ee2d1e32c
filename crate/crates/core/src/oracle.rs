//! Independent reference computations for the test suites.
//!
//! Everything here exists to cross-check a main implementation through a
//! different algebraic or algorithmic route, so none of it may share code
//! with what it verifies: the flow minimizer solves the KKT system over edge
//! variables (the resistance solver works with node potentials), the MST
//! reference is Kruskal with union-find (the distributed algorithm merges
//! fragments), and the BFS reference is a queue traversal.

use crate::electric::{ElectricNetwork, UnitFlow};
use crate::graph::{EdgeId, NodeId, PortedGraph};
use nalgebra::{DMatrix, DVector};

/// Minimum-energy unit flow by equality-constrained quadratic programming:
/// minimize `sum f_e^2 / w_e` subject to the flow laws, via the KKT system
/// over per-edge flow variables. Returns the flow and its energy.
pub fn qp_min_energy_flow(net: &ElectricNetwork) -> Option<(UnitFlow, f64)> {
    let comp = net.component_of_root();
    if !net.marked.iter().any(|m| comp.contains(m)) {
        return None;
    }
    // Variables: flows on edges with an endpoint in the root's component.
    let vars: Vec<usize> = net
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| comp.contains(&e.u) || comp.contains(&e.v))
        .map(|(i, _)| i)
        .collect();
    // Constraints: conservation at unmarked component nodes, source at root.
    let cons: Vec<NodeId> = comp.iter().copied().filter(|v| !net.is_marked(*v)).collect();
    let row_of: std::collections::HashMap<NodeId, usize> =
        cons.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let ne = vars.len();
    let nc = cons.len();
    let dim = ne + nc;
    let mut kkt = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for (col, &e) in vars.iter().enumerate() {
        kkt[(col, col)] = 2.0 / net.edges[e].weight;
        let edge = &net.edges[e];
        if let Some(&r) = row_of.get(&edge.u) {
            kkt[(ne + r, col)] = 1.0;
            kkt[(col, ne + r)] = 1.0;
        }
        if let Some(&r) = row_of.get(&edge.v) {
            kkt[(ne + r, col)] = -1.0;
            kkt[(col, ne + r)] = -1.0;
        }
    }
    if let Some(&r) = row_of.get(&net.root) {
        rhs[ne + r] = 1.0;
    }
    let sol = kkt.lu().solve(&rhs)?;
    let mut per_edge = vec![0.0; net.edges.len()];
    for (col, &e) in vars.iter().enumerate() {
        per_edge[e] = sol[col];
    }
    let energy = net
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| per_edge[e] * per_edge[e] / edge.weight)
        .sum();
    Some((UnitFlow { per_edge }, energy))
}

/// BFS distances from `src`; `None` for unreachable nodes.
pub fn bfs_distances(g: &PortedGraph, src: NodeId) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.node_count()];
    let mut queue = std::collections::VecDeque::new();
    dist[src] = Some(0);
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        for (_, u) in g.neighbors(v) {
            if dist[u].is_none() {
                dist[u] = Some(dv + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Count, for every node, how many of `sources` lie within `d` hops.
pub fn sources_within(g: &PortedGraph, sources: &[NodeId], d: u32) -> Vec<usize> {
    let mut counts = vec![0usize; g.node_count()];
    for &s in sources {
        for (v, dist) in bfs_distances(g, s).iter().enumerate() {
            if let Some(x) = dist {
                if *x <= d {
                    counts[v] += 1;
                }
            }
        }
    }
    counts
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Kruskal reference MST: sorted edge ids of the minimum spanning forest,
/// ordering by `(weight, edge id)`.
pub fn kruskal_mst(g: &PortedGraph) -> Vec<EdgeId> {
    let mut order: Vec<EdgeId> = (0..g.edge_count()).collect();
    order.sort_by(|&a, &b| {
        g.edge_weight(a)
            .partial_cmp(&g.edge_weight(b))
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut uf = UnionFind::new(g.node_count());
    let mut out = Vec::new();
    for e in order {
        let (u, v) = g.edge_endpoints(e);
        if uf.union(u, v) {
            out.push(e);
        }
    }
    out.sort_unstable();
    out
}

/// Ground-truth outgoing edges of a node set: `(node, port)` pairs leading
/// out of `members`.
pub fn cut_ports(g: &PortedGraph, members: &[NodeId]) -> Vec<(NodeId, crate::graph::Port)> {
    let set: std::collections::HashSet<_> = members.iter().copied().collect();
    let mut out = Vec::new();
    for &v in members {
        for (p, u) in g.neighbors(v) {
            if !set.contains(&u) {
                out.push((v, p));
            }
        }
    }
    out
}

/// Minimum-weight outgoing edge of a node set, if any.
pub fn min_cut_edge(g: &PortedGraph, members: &[NodeId]) -> Option<(NodeId, crate::graph::Port, f64)> {
    cut_ports(g, members)
        .into_iter()
        .map(|(v, p)| (v, p, g.edge_weight(g.edge_id(v, p))))
        .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
}
