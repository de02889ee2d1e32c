//! Graph generators: test families and the two lower-bound instance families.
//!
//! Port numbering is deterministic given the arguments; families that should
//! vary only in their port encodings take an explicit seed.

use super::{GraphError, NodeId, PortedGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("bridge ({0}, {1}, {2}, {3}) out of range: need a < b < n <= c < d < 2n")]
    BadBridge(NodeId, NodeId, NodeId, NodeId),
    #[error("level size {0} must be even")]
    OddLevelSize(usize),
    #[error("degree parameter {0} out of range 1..={1}")]
    BadDegree(usize, usize),
    #[error("(n={0}, m={1}) is infeasible for a connected simple graph")]
    InfeasibleSize(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Two disjoint cliques of `half` nodes each, on `0..half` and `half..2*half`.
///
/// With `bridge = Some((a, b, c, d))` (requiring `a < b < half <= c < d`),
/// the edges `{a,b}` and `{c,d}` are replaced in place by `{a,c}` and
/// `{b,d}`: exactly four adjacency-array entries differ from the unbridged
/// encoding, and the result is connected with diameter 3.
pub fn gen_two_cliques_crossed(
    half: usize,
    bridge: Option<(NodeId, NodeId, NodeId, NodeId)>,
) -> Result<PortedGraph, GenError> {
    let mut edges = Vec::new();
    for base in [0, half] {
        for u in 0..half {
            for v in (u + 1)..half {
                edges.push((base + u, base + v));
            }
        }
    }
    let mut g = PortedGraph::from_edge_list(2 * half, &edges, None)?;
    if let Some((a, b, c, d)) = bridge {
        if !(a < b && b < half && half <= c && c < d && d < 2 * half) {
            return Err(GenError::BadBridge(a, b, c, d));
        }
        let p = g.port_to(a, b).expect("clique edge");
        let q = g.port_to(b, a).expect("clique edge");
        let p2 = g.port_to(c, d).expect("clique edge");
        let q2 = g.port_to(d, c).expect("clique edge");
        g.rewrite_port(a, p, c, p2);
        g.rewrite_port(c, p2, a, p);
        g.rewrite_port(b, q, d, q2);
        g.rewrite_port(d, q2, b, q);
    }
    Ok(g)
}

/// `d` pairwise edge-disjoint perfect matchings on `0..n` (`n` even), via the
/// round-robin circle method. Round `k` pairs `n-1` with `k` and
/// `(k+i) mod (n-1)` with `(k-i) mod (n-1)`.
fn round_robin_matchings(n: usize, d: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(d);
    let rim = n - 1;
    for k in 0..d {
        let mut matching = vec![(n - 1, k)];
        for i in 1..n / 2 {
            let u = (k + i) % rim;
            let v = (k + rim - i) % rim;
            matching.push((u.min(v), u.max(v)));
        }
        out.push(matching);
    }
    out
}

/// The three-level BFS hard instance: root `0`; level A of `n` nodes adjacent
/// to the root; level B of `d` nodes completely joined to A; level C of `n`
/// nodes joined to A by a perfect matching and internally by `d` edge-disjoint
/// perfect matchings. Port orders are shuffled under `perm_seed`.
///
/// Returns the graph and the root. Requires `n` even and `1 <= d <= n-1`.
pub fn gen_bfs_hard_instance(
    n: usize,
    d: usize,
    perm_seed: u64,
) -> Result<(PortedGraph, NodeId), GenError> {
    if !n.is_multiple_of(2) {
        return Err(GenError::OddLevelSize(n));
    }
    if d == 0 || d > n - 1 {
        return Err(GenError::BadDegree(d, n - 1));
    }
    let a = |i: usize| 1 + i;
    let b = |j: usize| 1 + n + j;
    let c = |i: usize| 1 + n + d + i;
    let total = 1 + n + d + n;
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((0, a(i)));
    }
    for i in 0..n {
        for j in 0..d {
            edges.push((a(i), b(j)));
        }
    }
    for i in 0..n {
        edges.push((a(i), c(i)));
    }
    for matching in round_robin_matchings(n, d) {
        for (u, v) in matching {
            edges.push((c(u), c(v)));
        }
    }
    let mut g = PortedGraph::from_edge_list(total, &edges, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
    g.shuffle_ports(&mut rng);
    Ok((g, 0))
}

/// Connected random graph: a random spanning tree, then `m - (n-1)` fill
/// edges sampled without replacement. When `weighted`, edge weights are a
/// random permutation of `1..=m`, so weights are pairwise distinct integers.
pub fn gen_random_connected(
    n: usize,
    m: usize,
    weighted: bool,
    seed: u64,
) -> Result<PortedGraph, GenError> {
    let max = n * (n - 1) / 2;
    if n == 0 || m + 1 < n || m > max {
        return Err(GenError::InfeasibleSize(n, m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(m);
    let mut present = std::collections::HashSet::new();
    for i in 1..n {
        let u = order[i];
        let v = order[rng.gen_range(0..i)];
        edges.push((u, v));
        present.insert((u.min(v), u.max(v)));
    }
    let mut pool: Vec<(NodeId, NodeId)> = Vec::with_capacity(max - edges.len());
    for u in 0..n {
        for v in (u + 1)..n {
            if !present.contains(&(u, v)) {
                pool.push((u, v));
            }
        }
    }
    let need = m - edges.len();
    // Partial Fisher-Yates: draw `need` distinct fill edges.
    for i in 0..need {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
        edges.push(pool[i]);
    }
    edges.shuffle(&mut rng);
    let weights = if weighted {
        let mut w: Vec<f64> = (1..=m).map(|x| x as f64).collect();
        w.shuffle(&mut rng);
        Some(w)
    } else {
        None
    };
    Ok(PortedGraph::from_edge_list(n, &edges, weights.as_deref())?)
}

/// Star on `n` nodes with center `0`.
pub fn gen_star(n: usize) -> Result<PortedGraph, GenError> {
    if n == 0 {
        return Err(GenError::InfeasibleSize(0, 0));
    }
    let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
    Ok(PortedGraph::from_edge_list(n, &edges, None)?)
}

/// Path `0 - 1 - ... - n-1`.
pub fn gen_path(n: usize) -> Result<PortedGraph, GenError> {
    if n == 0 {
        return Err(GenError::InfeasibleSize(0, 0));
    }
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Ok(PortedGraph::from_edge_list(n, &edges, None)?)
}

/// Complete graph on `n` nodes.
pub fn gen_complete(n: usize) -> Result<PortedGraph, GenError> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Ok(PortedGraph::from_edge_list(n, &edges, None)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bfs_distances;

    #[test]
    fn two_cliques_unbridged_shape() {
        let g = gen_two_cliques_crossed(5, None).unwrap();
        assert_eq!(g.node_count(), 10);
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(!g.is_connected());
        assert_eq!(g.component_of(0).len(), 5);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn two_cliques_bridged_connected_diameter_3() {
        let g = gen_two_cliques_crossed(5, Some((0, 1, 7, 8))).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(g.is_connected());
        assert!(g.validate().is_empty());
        let mut diameter = 0;
        for v in 0..10 {
            let dist = bfs_distances(&g, v);
            diameter = diameter.max(dist.iter().map(|d| d.unwrap()).max().unwrap());
        }
        assert_eq!(diameter, 3);
    }

    #[test]
    fn two_cliques_bridged_differs_in_exactly_4_entries() {
        let plain = gen_two_cliques_crossed(5, None).unwrap();
        let crossed = gen_two_cliques_crossed(5, Some((0, 1, 7, 8))).unwrap();
        let fa = plain.adjacency_arrays();
        let fb = crossed.adjacency_arrays();
        let mut diff = 0;
        for v in 0..10 {
            for p in 0..fa[v].len() {
                if fa[v][p] != fb[v][p] {
                    diff += 1;
                }
            }
        }
        assert_eq!(diff, 4);
    }

    #[test]
    fn bfs_hard_instance_shape() {
        let (g, root) = gen_bfs_hard_instance(6, 3, 7).unwrap();
        assert_eq!(root, 0);
        assert_eq!(g.node_count(), 16);
        // n + n*d + n + n*d/2
        assert_eq!(g.edge_count(), 6 + 18 + 6 + 9);
        assert!(g.validate().is_empty());
        let a_range = 1..=6usize;
        let c_range = 10..=15usize;
        for v in a_range {
            assert_eq!(g.degree(v), 3 + 2, "A nodes have degree d+2");
        }
        for v in c_range {
            assert_eq!(g.degree(v), 3 + 1, "C nodes have degree d+1");
        }
        // All nodes within 2 hops of the root.
        let dist = bfs_distances(&g, 0);
        assert!(dist.iter().all(|d| d.unwrap() <= 2));
    }

    #[test]
    fn bfs_hard_instance_matchings_edge_disjoint() {
        for (n, d) in [(6, 3), (8, 5), (4, 1)] {
            let matchings = round_robin_matchings(n, d);
            let mut seen = std::collections::HashSet::new();
            for matching in &matchings {
                assert_eq!(matching.len(), n / 2);
                let mut used = std::collections::HashSet::new();
                for &(u, v) in matching {
                    assert!(used.insert(u) && used.insert(v), "perfect matching");
                    assert!(seen.insert((u.min(v), u.max(v))), "edge-disjoint");
                }
            }
        }
    }

    #[test]
    fn bfs_hard_instance_matching_edges_forced_into_any_bfs() {
        // Each C node's unique shortest path to the root passes through its
        // matched A partner.
        let (g, root) = gen_bfs_hard_instance(6, 3, 11).unwrap();
        let dist = bfs_distances(&g, root);
        for ci in 0..6usize {
            let cnode = 1 + 6 + 3 + ci;
            assert_eq!(dist[cnode], Some(2));
            let preds: Vec<_> = g
                .neighbors(cnode)
                .map(|(_, u)| u)
                .filter(|&u| dist[u] == Some(1))
                .collect();
            assert_eq!(preds, vec![1 + ci], "unique depth-1 predecessor is the match");
        }
    }

    #[test]
    fn random_connected_extremes() {
        let tree = gen_random_connected(5, 4, false, 3).unwrap();
        assert_eq!(tree.edge_count(), 4);
        assert!(tree.is_connected());
        let k5 = gen_random_connected(5, 10, false, 3).unwrap();
        assert_eq!(k5.edge_count(), 10);
        assert!(k5.degrees().iter().all(|&d| d == 4));
        assert!(gen_random_connected(5, 3, false, 0).is_err());
        assert!(gen_random_connected(5, 11, false, 0).is_err());
    }

    #[test]
    fn random_weighted_distinct_weights() {
        let g = gen_random_connected(12, 30, true, 9).unwrap();
        let mut w: Vec<u64> = g.weights().unwrap().iter().map(|x| x.to_bits()).collect();
        w.sort_unstable();
        w.dedup();
        assert_eq!(w.len(), 30);
    }

    #[test]
    fn generators_deterministic() {
        let a = gen_random_connected(20, 50, true, 42).unwrap();
        let b = gen_random_connected(20, 50, true, 42).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        let (h1, _) = gen_bfs_hard_instance(6, 3, 5).unwrap();
        let (h2, _) = gen_bfs_hard_instance(6, 3, 5).unwrap();
        assert_eq!(h1.content_hash(), h2.content_hash());
        let (h3, _) = gen_bfs_hard_instance(6, 3, 6).unwrap();
        assert_ne!(h1.content_hash(), h3.content_hash());
    }
}
