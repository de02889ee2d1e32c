//! End-to-end distributed algorithms: MST (and with it leader election,
//! spanning tree, broadcast), low-depth BFS exploration, sparse neighborhood
//! covers, and full BFS.
//!
//! All algorithm runs are orchestrated centrally but charge the message
//! ledger exactly what the distributed protocol would send, message by
//! message, with concrete `(node, port)` records so runs can be replayed
//! against the query oracle.

pub mod bfs;
pub mod cover;
pub mod explore;
pub mod mst;

pub use bfs::{bfs, BfsOutput};
pub use cover::{sparse_cover, CoverAudit, CoverOutput, CoverTree};
pub use explore::{low_depth_bfs, BfsForest};
pub use mst::{broadcast_via_st, leader_election, mst, LeaderOutput, MstOutput, TreeRole};

use crate::config::RunConstants;
use crate::sim::Fidelity;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum AlgoError {
    #[error("graph is disconnected: {fragments} spanning fragments remain")]
    Disconnected { fragments: usize },
    #[error("phase cap exceeded without termination")]
    PhaseCapExceeded,
    #[error("projected {projected} state-vector steps exceed the exact-mode budget {budget}")]
    ExactBudgetExceeded { projected: u64, budget: u64 },
    #[error(transparent)]
    Primitive(#[from] crate::primitives::PrimitiveError),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Options shared by the algorithm entry points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgoOptions {
    pub delta: f64,
    /// `None` resolves by instance size: exact up to 64 nodes, cost-model
    /// beyond.
    pub fidelity: Option<Fidelity>,
    pub seed: u64,
    pub constants: RunConstants,
    /// Record a `(node, port)` transcript with this event cap.
    pub transcript_cap: Option<usize>,
    /// Collect walk-network audits (parameter-bound checks).
    pub collect_audits: bool,
}

impl Default for AlgoOptions {
    fn default() -> Self {
        AlgoOptions {
            delta: 0.01,
            fidelity: None,
            seed: 0,
            constants: RunConstants::default(),
            transcript_cap: None,
            collect_audits: false,
        }
    }
}

impl AlgoOptions {
    pub fn ledger(&self) -> crate::sim::MessageLedger {
        let ledger = crate::sim::MessageLedger::new(self.constants.ledger_round_window);
        match self.transcript_cap {
            Some(cap) => ledger.with_transcript(cap),
            None => ledger,
        }
    }

    /// Resolves the fidelity for an instance with `n` nodes and `m` edges,
    /// refusing exact mode when the projected step count exceeds the budget.
    pub fn resolve_fidelity(&self, n: usize, m: usize) -> Result<Fidelity, AlgoError> {
        match self.fidelity {
            Some(Fidelity::CostModel) => Ok(Fidelity::CostModel),
            Some(Fidelity::Exact) => {
                let projected = projected_steps(&self.constants, n, m);
                if projected > self.constants.exact_step_budget {
                    Err(AlgoError::ExactBudgetExceeded {
                        projected,
                        budget: self.constants.exact_step_budget,
                    })
                } else {
                    Ok(Fidelity::Exact)
                }
            }
            None => {
                if n <= 64 && projected_steps(&self.constants, n, m) <= self.constants.exact_step_budget
                {
                    Ok(Fidelity::Exact)
                } else {
                    Ok(Fidelity::CostModel)
                }
            }
        }
    }
}

/// Crude upper estimate of the state-vector work of an exact run: walks per
/// fragment generation times steps times walk-space dimension.
fn projected_steps(constants: &RunConstants, n: usize, m: usize) -> u64 {
    let n_f = n.max(2) as f64;
    let m_f = m.max(1) as f64;
    let t = constants.walk_steps(1.0 + n_f.log2(), 2.0 * n_f * n_f) as f64;
    let walks = n_f * (m_f.log2().ceil() + 2.0);
    (walks * t * (2.0 * m_f + 2.0)) as u64
}

/// Draws `count` pairwise distinct ids from `[0, bound)`.
pub(crate) fn distinct_ids<R: rand::Rng>(count: usize, bound: u64, rng: &mut R) -> Vec<u64> {
    assert!((count as u64) <= bound);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let id = rng.gen_range(0..bound);
        if seen.insert(id) {
            out.push(id);
        }
    }
    out
}
