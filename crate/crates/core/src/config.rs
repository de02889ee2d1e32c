//! Run-wide constants.
//!
//! Every tunable that appears in a cost formula or a protocol schedule lives
//! here, so that output manifests can embed the exact configuration a run
//! used and sweeps stay comparable across sizes.

use serde::{Deserialize, Serialize};

/// Constants shared by all simulator layers.
///
/// Defaults reproduce the values used throughout the test suite. Nodes in the
/// simulated network are only ever given `n_bound` (a polynomial upper bound
/// on the network size), never the actual `n`, so every schedule derived from
/// these constants is legal in the clean-network (KT0) setting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConstants {
    /// Classical message payload budget, in machine words per message.
    /// Each word carries one poly(n)-bounded quantity. Exceeding the budget
    /// is a hard error: oversized payloads would void the accounting.
    pub word_budget: usize,
    /// Polynomial upper bound on the network size known to every node.
    pub n_bound: u64,
    /// Detection error budget divisor: a run with target error `delta`
    /// gives each scheduled walk `delta / (walk_budget_div * n_bound)`.
    /// Union-bounding over at most `walk_budget_div * n_bound` walk
    /// detections per run keeps the end-to-end error below `delta`.
    pub walk_budget_div: u64,
    /// Repetition constant: a detection with error budget `d` runs
    /// `ceil(rep_constant * ln(1/d))` phase-detection trials.
    pub rep_constant: f64,
    /// Reflection weight constant for the root's virtual edge.
    pub walk_c1: f64,
    /// Step-count constant: `T = ceil(t_factor * sqrt(1/2 + walk_c1*R*W))`.
    pub t_factor: f64,
    /// Growth ratio of the Grover stage caps.
    pub grover_growth: f64,
    /// Extra stages run at the cap before a Grover repetition gives up.
    pub grover_cap_extra: u32,
    /// Messages per checking-oracle exchange (query out, reply back).
    pub check_messages: u64,
    /// Rounds per checking-oracle exchange.
    pub check_rounds: u64,
    /// Abort a fragment merge when the merged component exceeds
    /// `merge_abort_factor * n_star` nodes.
    pub merge_abort_factor: f64,
    /// Resolve an outgoing-edge probe classically when the restricted
    /// incident edge count is at most `direct_probe_factor * n_i` (the same
    /// order as the convergecast the probe already pays for).
    pub direct_probe_factor: f64,
    /// Ping subphase length: `ceil(ping_round_c1 * log2(n)^3)` rounds.
    pub ping_round_c1: f64,
    /// Cover sampling: phase `i` of `kappa` samples each uncovered node as a
    /// root with probability `min(1, n^(i/kappa) * ln(cover_sample_c * n) / n)`.
    pub cover_sample_c: f64,
    /// Verify walk preconditions (weight bound, effective resistance) in
    /// exact fidelity when the network has at most this many nodes.
    pub audit_max_nodes: usize,
    /// Refuse exact fidelity when the projected state-vector step count
    /// exceeds this budget.
    pub exact_step_budget: u64,
    /// Number of most recent per-round counters retained by a ledger.
    pub ledger_round_window: usize,
}

impl Default for RunConstants {
    fn default() -> Self {
        RunConstants {
            word_budget: 4,
            n_bound: 1 << 17,
            walk_budget_div: 64,
            rep_constant: 48.0,
            walk_c1: 9.0,
            t_factor: 80.0,
            grover_growth: 1.2,
            grover_cap_extra: 4,
            check_messages: 2,
            check_rounds: 2,
            merge_abort_factor: 1.0,
            direct_probe_factor: 1.0,
            ping_round_c1: 4.0,
            cover_sample_c: 4.0,
            audit_max_nodes: 256,
            exact_step_budget: 200_000_000_000,
            ledger_round_window: 1024,
        }
    }
}

impl RunConstants {
    /// Per-walk detection error budget for a run targeting error `delta`.
    pub fn walk_delta(&self, delta: f64) -> f64 {
        delta / (self.walk_budget_div as f64 * self.n_bound as f64)
    }

    /// Trial count for one detection with error budget `delta_walk`.
    pub fn detection_trials(&self, delta_walk: f64) -> u64 {
        (self.rep_constant * (1.0 / delta_walk).ln()).ceil() as u64
    }

    /// Walk length for resistance bound `r` and weight bound `w`.
    pub fn walk_steps(&self, r: f64, w: f64) -> u64 {
        (self.t_factor * (0.5 + self.walk_c1 * r * w).sqrt()).ceil() as u64
    }

    /// Grover repetitions for failure bound `alpha`: error 1/3 per
    /// repetition, driven below `alpha` by independent restarts.
    pub fn grover_reps(&self, alpha: f64) -> u64 {
        ((1.0 / alpha).ln() / 3.0f64.ln()).ceil().max(1.0) as u64
    }
}
