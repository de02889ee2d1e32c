//! Low-depth BFS explorations, grown outside-in.
//!
//! Phase `i` grows every tree by exactly one layer: instead of frontier
//! nodes contacting their neighbors, every node searches its own ports for a
//! neighbor that joined some tree's last layer — one Grover search per
//! subphase, `k` subphases per phase so a node can join up to `k` trees.
//! Searching is what costs: a node's search charges `O(sqrt(deg))` messages
//! whether or not anything is found.

use super::AlgoError;
use crate::config::RunConstants;
use crate::graph::{NodeId, Port, PortedGraph};
use crate::primitives::{distributed_grover, GroverTask};
use crate::sim::MessageLedger;
use rand::Rng;
use std::collections::BTreeMap;

/// One exploration tree: members with layer and parent port.
#[derive(Debug, Clone)]
pub struct ExploreTree {
    pub source: NodeId,
    pub members: BTreeMap<NodeId, (u32, Option<Port>)>,
}

/// Forest of depth-bounded BFS trees rooted at the sources.
#[derive(Debug, Clone)]
pub struct BfsForest {
    pub trees: Vec<ExploreTree>,
}

impl BfsForest {
    pub fn tree_of(&self, source: NodeId) -> Option<&ExploreTree> {
        self.trees.iter().find(|t| t.source == source)
    }
}

/// Runs `d` phases of `k` subphases each. In every subphase every node (that
/// still has trees left to join) searches its neighborhood; phases where no
/// tree grew at all end the run early.
#[allow(clippy::too_many_arguments)]
pub fn low_depth_bfs<R: Rng>(
    graph: &PortedGraph,
    sources: &[NodeId],
    d: u32,
    k: usize,
    alpha: f64,
    constants: &RunConstants,
    rng: &mut R,
    ledger: &mut MessageLedger,
    phase_tag: &str,
) -> Result<BfsForest, AlgoError> {
    let n = graph.node_count();
    let mut trees: Vec<ExploreTree> = sources
        .iter()
        .map(|&s| ExploreTree {
            source: s,
            members: BTreeMap::from([(s, (0, None))]),
        })
        .collect();
    // joined[v] = sorted tree indices v belongs to.
    let mut joined: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, &s) in sources.iter().enumerate() {
        joined[s].push(t);
    }
    if sources.is_empty() || k == 0 {
        return Ok(BfsForest { trees });
    }
    for phase in 1..=d {
        // frontier[v] = trees in which v sits at layer phase-1.
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut any_frontier = false;
        for (t, tree) in trees.iter().enumerate() {
            for (&v, &(layer, _)) in &tree.members {
                if layer == phase - 1 {
                    frontier[v].push(t);
                    any_frontier = true;
                }
            }
        }
        if !any_frontier {
            break;
        }
        for _sub in 0..k {
            // Joins resolve against the state at subphase start.
            let mut planned: Vec<(NodeId, Port, usize, u32)> = Vec::new();
            let mut any_candidate = false;
            for v in 0..n {
                if graph.degree(v) == 0 {
                    continue;
                }
                let candidate_tree = |p: Port| -> Option<usize> {
                    let u = graph.neighbor(v, p);
                    frontier[u]
                        .iter()
                        .copied()
                        .find(|t| joined[v].binary_search(t).is_err())
                };
                let has_candidates = (0..graph.degree(v)).any(|p| candidate_tree(p).is_some());
                any_candidate |= has_candidates;
                let pred = |p: Port| candidate_tree(p).is_some();
                let task = GroverTask::over_ports(v, graph.degree(v), &pred, alpha, constants);
                let outcome = distributed_grover(&task, constants, rng, ledger, phase_tag)?;
                if let Some(p) = outcome.found {
                    let t = candidate_tree(p).expect("verified find");
                    let u = graph.neighbor(v, p);
                    let layer = trees[t].members[&u].0 + 1;
                    planned.push((v, p, t, layer));
                }
            }
            for (v, p, t, layer) in planned {
                if joined[v].binary_search(&t).is_ok() {
                    continue;
                }
                trees[t].members.insert(v, (layer, Some(p)));
                let pos = joined[v].binary_search(&t).unwrap_err();
                joined[v].insert(pos, t);
            }
            if !any_candidate {
                break;
            }
        }
    }
    Ok(BfsForest { trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{gen_random_connected, gen_star};
    use crate::oracle::bfs_distances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(
        graph: &PortedGraph,
        sources: &[NodeId],
        d: u32,
        k: usize,
        seed: u64,
    ) -> (BfsForest, MessageLedger) {
        let constants = RunConstants::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ledger = MessageLedger::new(16);
        let forest = low_depth_bfs(
            graph,
            sources,
            d,
            k,
            1e-9,
            &constants,
            &mut rng,
            &mut ledger,
            "explore",
        )
        .unwrap();
        (forest, ledger)
    }

    #[test]
    fn full_depth_single_source_matches_oracle() {
        let g = gen_random_connected(24, 40, false, 5).unwrap();
        let dist = bfs_distances(&g, 0);
        let diameter = dist.iter().map(|d| d.unwrap()).max().unwrap();
        let (forest, _) = run(&g, &[0], diameter, 1, 3);
        let tree = forest.tree_of(0).unwrap();
        assert_eq!(tree.members.len(), 24);
        for (&v, &(layer, _)) in &tree.members {
            assert_eq!(Some(layer), dist[v], "layer of {v}");
        }
    }

    #[test]
    fn depth_one_trees_are_closed_neighborhoods() {
        let g = gen_star(7).unwrap();
        let (forest, _) = run(&g, &[0], 1, 1, 9);
        let tree = forest.tree_of(0).unwrap();
        assert_eq!(tree.members.len(), 7);
        assert!(tree.members.values().all(|&(l, _)| l <= 1));
    }

    #[test]
    fn grid_corners_disjoint_depth_trees() {
        // 5x5 grid; sources at opposite corners, depth 3, congestion 1.
        let side = 5usize;
        let idx = |r: usize, c: usize| r * side + c;
        let mut edges = Vec::new();
        for r in 0..side {
            for c in 0..side {
                if c + 1 < side {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < side {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        let g = PortedGraph::from_edge_list(side * side, &edges, None).unwrap();
        let corners = [idx(0, 0), idx(side - 1, side - 1)];
        let dist0 = bfs_distances(&g, corners[0]);
        let dist1 = bfs_distances(&g, corners[1]);
        let (forest, _) = run(&g, &corners, 3, 1, 21);
        let t0 = forest.tree_of(corners[0]).unwrap();
        let t1 = forest.tree_of(corners[1]).unwrap();
        for (&v, &(layer, _)) in &t0.members {
            assert_eq!(Some(layer), dist0[v]);
            assert!(layer <= 3);
        }
        for (&v, &(layer, _)) in &t1.members {
            assert_eq!(Some(layer), dist1[v]);
            assert!(layer <= 3);
        }
        // Depth-3 balls of opposite corners of a 5x5 grid are disjoint.
        assert!(t0.members.keys().all(|v| !t1.members.contains_key(v)));
    }

    #[test]
    fn parent_ports_point_into_previous_layer() {
        let g = gen_random_connected(18, 30, false, 8).unwrap();
        let (forest, _) = run(&g, &[2, 11], 4, 2, 13);
        for tree in &forest.trees {
            for (&v, &(layer, port)) in &tree.members {
                if let Some(p) = port {
                    let u = g.neighbor(v, p);
                    assert_eq!(tree.members[&u].0, layer - 1, "parent of {v} one layer up");
                }
            }
        }
    }
}
