//! Sparse neighborhood covers.
//!
//! A `(kappa, W)` cover is a collection of trees such that every tree has
//! depth `O(W * kappa)`, every node lies in few trees, and every node's
//! `W`-neighborhood is contained in some tree. The construction samples
//! uncovered roots over `kappa` phases with geometrically increasing rates;
//! phase `i` explores to depth `2(kappa - i + 1) W` and covers everything
//! within `2(kappa - i) W` of a root. The final phase samples every
//! remaining uncovered node, so the neighborhood property holds
//! unconditionally; depth is bounded by construction; sparsity is audited.

use super::explore::low_depth_bfs;
use super::AlgoError;
use crate::config::RunConstants;
use crate::graph::{NodeId, Port, PortedGraph};
use crate::oracle::sources_within;
use crate::sim::MessageLedger;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// One cover tree.
#[derive(Debug, Clone)]
pub struct CoverTree {
    pub root: NodeId,
    /// Member -> (depth in tree, parent port).
    pub members: BTreeMap<NodeId, (u32, Option<Port>)>,
}

#[derive(Debug, Clone)]
pub struct CoverOutput {
    pub trees: Vec<CoverTree>,
    pub kappa: u32,
    pub width: u32,
}

/// Measured cover quality against the three defining properties.
#[derive(Debug, Clone, Serialize)]
pub struct CoverAudit {
    pub max_depth: u32,
    /// `max_depth <= depth_constant * width * kappa` with this constant.
    pub depth_constant: f64,
    pub max_membership: usize,
    /// `max_membership <= sparsity_constant * kappa * n^(1/kappa) * log2(2n)`.
    pub sparsity_constant: f64,
    pub neighborhood_ok: bool,
}

impl CoverOutput {
    /// Trees containing `v`.
    pub fn trees_of(&self, v: NodeId) -> Vec<usize> {
        self.trees
            .iter()
            .enumerate()
            .filter(|(_, t)| t.members.contains_key(&v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Exhaustive audit of the three cover properties.
    pub fn audit(&self, graph: &PortedGraph) -> CoverAudit {
        let n = graph.node_count();
        let max_depth = self
            .trees
            .iter()
            .flat_map(|t| t.members.values().map(|&(d, _)| d))
            .max()
            .unwrap_or(0);
        let mut membership = vec![0usize; n];
        for tree in &self.trees {
            for &v in tree.members.keys() {
                membership[v] += 1;
            }
        }
        let max_membership = membership.iter().copied().max().unwrap_or(0);
        let mut neighborhood_ok = true;
        'outer: for v in 0..n {
            let mut ball: Vec<NodeId> = vec![v];
            let mut frontier = vec![v];
            for _ in 0..self.width {
                let mut next = Vec::new();
                for &u in &frontier {
                    for (_, w) in graph.neighbors(u) {
                        if !ball.contains(&w) {
                            ball.push(w);
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
            if !self
                .trees
                .iter()
                .any(|t| ball.iter().all(|u| t.members.contains_key(u)))
            {
                neighborhood_ok = false;
                break 'outer;
            }
        }
        let depth_bound = (self.width.max(1) * self.kappa.max(1)) as f64;
        let sparsity_bound = self.kappa.max(1) as f64
            * (n as f64).powf(1.0 / self.kappa.max(1) as f64)
            * (2.0 * n as f64).log2();
        CoverAudit {
            max_depth,
            depth_constant: max_depth as f64 / depth_bound,
            max_membership,
            sparsity_constant: max_membership as f64 / sparsity_bound,
            neighborhood_ok,
        }
    }
}

/// Builds a `(kappa, width)` cover with per-search failure bound `alpha`.
#[allow(clippy::too_many_arguments)]
pub fn sparse_cover<R: Rng>(
    graph: &PortedGraph,
    kappa: u32,
    width: u32,
    alpha: f64,
    constants: &RunConstants,
    rng: &mut R,
    ledger: &mut MessageLedger,
) -> Result<CoverOutput, AlgoError> {
    let n = graph.node_count();
    let mut covered = vec![false; n];
    let mut trees: Vec<CoverTree> = Vec::new();
    for phase in 1..=kappa {
        let rate = ((n as f64).powf(phase as f64 / kappa as f64)
            * (constants.cover_sample_c * n as f64).ln()
            / n as f64)
            .min(1.0);
        let sources: Vec<NodeId> =
            (0..n).filter(|&v| !covered[v] && rng.gen_bool(rate)).collect();
        if sources.is_empty() {
            continue;
        }
        let explore_depth = 2 * (kappa - phase + 1) * width;
        let cover_radius = 2 * (kappa - phase) * width;
        // Realized congestion for this phase's exploration schedule.
        let k = sources_within(graph, &sources, explore_depth)
            .into_iter()
            .max()
            .unwrap_or(0);
        let forest = low_depth_bfs(
            graph,
            &sources,
            explore_depth,
            k,
            alpha,
            constants,
            rng,
            ledger,
            "cover_explore",
        )?;
        for tree in forest.trees {
            for (&v, &(depth, _)) in &tree.members {
                if depth <= cover_radius {
                    covered[v] = true;
                }
            }
            trees.push(CoverTree { root: tree.source, members: tree.members });
        }
    }
    Ok(CoverOutput { trees, kappa, width })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{gen_complete, gen_path, gen_random_connected};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn build(graph: &PortedGraph, kappa: u32, width: u32, seed: u64) -> CoverOutput {
        let constants = RunConstants::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ledger = MessageLedger::new(16);
        sparse_cover(graph, kappa, width, 1e-9, &constants, &mut rng, &mut ledger).unwrap()
    }

    #[test]
    fn random_graph_cover_properties() {
        let g = gen_random_connected(32, 64, false, 17).unwrap();
        let kappa = 5; // ceil(log2(32))
        let cover = build(&g, kappa, 1, 3);
        let audit = cover.audit(&g);
        assert!(audit.neighborhood_ok);
        assert!(audit.max_depth <= 2 * kappa);
        assert!(audit.sparsity_constant <= 8.0, "sparsity {}", audit.sparsity_constant);
    }

    #[test]
    fn complete_graph_single_phase_covers() {
        let g = gen_complete(12).unwrap();
        let cover = build(&g, 4, 1, 5);
        let audit = cover.audit(&g);
        assert!(audit.neighborhood_ok);
        // Any valid cover is accepted; diameter 1 means some tree holds
        // everything.
        assert!(cover.trees.iter().any(|t| t.members.len() == 12));
    }

    #[test]
    fn path_graph_membership_within_budget() {
        let g = gen_path(40).unwrap();
        let kappa = 6;
        let cover = build(&g, kappa, 1, 11);
        let audit = cover.audit(&g);
        assert!(audit.neighborhood_ok);
        assert!(audit.sparsity_constant <= 8.0, "sparsity {}", audit.sparsity_constant);
        assert!(audit.depth_constant <= 2.0 + 1e-9);
    }
}
