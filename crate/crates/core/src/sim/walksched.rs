//! Concurrent walk scheduling.
//!
//! A batch of walk requests executes in lock step. Edge-disjoint walks cost
//! one message and one round per step; walks that may share edges incident to
//! marked vertices pay a three-round query/reply/move phase per step, so each
//! step charges three messages. The disjointness preconditions are checked:
//! violating them would void the concurrency guarantees the charges are
//! based on.

use super::{Fidelity, MessageLedger, SimError};
use crate::config::RunConstants;
use crate::electric::{ElectricNetwork, WalkToken};
use crate::graph::{NodeId, Port};
use crate::walk::{detect_marked, Detection, MarkedVerdict};
use rand::Rng;
use std::collections::HashMap;

/// Scheduling discipline for a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    /// A single walk with the network to itself.
    Exclusive,
    /// Pairwise edge-disjoint walks.
    EdgeDisjoint,
    /// Walks may share edges only where an endpoint is marked for one of
    /// the two walks.
    MarkedShared,
}

impl ScheduleMode {
    /// Messages (and rounds) charged per walk step.
    pub fn per_step(&self) -> u64 {
        match self {
            ScheduleMode::Exclusive | ScheduleMode::EdgeDisjoint => 1,
            ScheduleMode::MarkedShared => 3,
        }
    }
}

/// One walk to run: the network, its declared parameter bounds, the error
/// budget, and a representative arc for transcript replay.
#[derive(Debug, Clone)]
pub struct WalkRequest {
    pub net: ElectricNetwork,
    pub r_bound: f64,
    pub w_bound: f64,
    pub delta: f64,
    pub rep: Option<(NodeId, Port)>,
}

/// Verdict plus accounting for one request.
#[derive(Debug, Clone)]
pub struct WalkOutcome {
    pub token: WalkToken,
    pub verdict: MarkedVerdict,
    pub detection: Detection,
}

fn edge_key(net: &ElectricNetwork, idx: usize) -> (usize, usize, usize) {
    let e = &net.edges[idx];
    match e.base_edge {
        Some(id) => (0, id, 0),
        None => (1, e.u.min(e.v), e.u.max(e.v)),
    }
}

fn check_disjointness(batch: &[WalkRequest], mode: ScheduleMode) -> Result<(), SimError> {
    if mode == ScheduleMode::Exclusive {
        if batch.len() != 1 {
            return Err(SimError::NotExclusive(batch.len()));
        }
        return Ok(());
    }
    let mut owner: HashMap<(usize, usize, usize), (usize, usize)> = HashMap::new();
    for (i, req) in batch.iter().enumerate() {
        for (idx, edge) in req.net.edges.iter().enumerate() {
            let key = edge_key(&req.net, idx);
            if let Some(&(j, _)) = owner.get(&key) {
                let other = &batch[j];
                let allowed = mode == ScheduleMode::MarkedShared
                    && (req.net.is_marked(edge.u)
                        || req.net.is_marked(edge.v)
                        || other.net.is_marked(edge.u)
                        || other.net.is_marked(edge.v));
                if !allowed {
                    return Err(SimError::ConflictingEdge {
                        a: other.net.token,
                        b: req.net.token,
                        u: edge.u,
                        v: edge.v,
                    });
                }
            } else {
                owner.insert(key, (i, idx));
            }
        }
    }
    Ok(())
}

/// Runs a batch of walk detections, charging message and round costs.
///
/// Message cost per request is `trials * steps * per_step`; the batch
/// advances the round counter by the maximum per-request round cost, since
/// the walks execute concurrently. Requests with an empty network edge set
/// charge nothing: every superposed configuration of such a walk carries no
/// real message.
#[allow(clippy::too_many_arguments)]
pub fn schedule_walks<R: Rng>(
    batch: &[WalkRequest],
    mode: ScheduleMode,
    fidelity: Fidelity,
    constants: &RunConstants,
    rng: &mut R,
    ledger: &mut MessageLedger,
    phase: &str,
    mut auditor: Option<&mut dyn FnMut(&WalkRequest)>,
) -> Result<Vec<WalkOutcome>, SimError> {
    let mut seen = std::collections::HashSet::new();
    for req in batch {
        if !seen.insert(req.net.token) {
            return Err(SimError::DuplicateToken(req.net.token));
        }
    }
    check_disjointness(batch, mode)?;
    let per_step = mode.per_step();
    let mut outcomes = Vec::with_capacity(batch.len());
    let mut max_rounds = 0u64;
    for req in batch {
        if let Some(hook) = auditor.as_mut() {
            hook(req);
        }
        let detection = detect_marked(
            &req.net,
            req.r_bound,
            req.w_bound,
            req.delta,
            fidelity,
            constants,
            rng,
        )?;
        let steps = detection.walk_steps_charged();
        if !req.net.edges.is_empty() {
            ledger.charge_walk_steps(phase, req.rep, steps, per_step);
        }
        max_rounds = max_rounds.max(steps * per_step);
        outcomes.push(WalkOutcome { token: req.net.token, verdict: detection.verdict, detection });
    }
    ledger.advance_rounds(phase, max_rounds);
    Ok(outcomes)
}
