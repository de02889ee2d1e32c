//! Synchronous round-based execution with exact message accounting.
//!
//! Message complexity here follows the quantum routing model: a message sent
//! in superposition over a node's ports counts once, so a walk step or a
//! Grover query charges a fixed number of messages regardless of how wide the
//! superposition is. The [`MessageLedger`] tracks counts per category and per
//! algorithm phase; the optional [`Transcript`] records, for every charged
//! message, a concrete `(node, port)` it can be replayed from against the
//! query oracle.

pub mod engine;
pub mod walksched;

pub use engine::{run_protocol, Incoming, NodeApi, NodeProgram, ProtocolRun};
pub use walksched::{schedule_walks, ScheduleMode, WalkOutcome, WalkRequest};

use crate::graph::{NodeId, Port};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::VecDeque;
use thiserror::Error;

/// How quantum subroutine outcomes are resolved. Charges are identical in
/// both modes; only the verdict sampling differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fidelity {
    /// Exact state-vector simulation of walk outcomes.
    Exact,
    /// Classical resolution of outcomes with unchanged message charges.
    CostModel,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("node {node} sent on invalid port {port}")]
    InvalidPort { node: NodeId, port: Port },
    #[error("node {node} payload of {words} words exceeds the {budget}-word budget")]
    PayloadTooLarge { node: NodeId, words: usize, budget: usize },
    #[error("round cap {0} exceeded")]
    RoundCapExceeded(u64),
    #[error("duplicate walk token {0:?}")]
    DuplicateToken(crate::electric::WalkToken),
    #[error("walks {a:?} and {b:?} share edge ({u}, {v}) not incident to a marked vertex")]
    ConflictingEdge {
        a: crate::electric::WalkToken,
        b: crate::electric::WalkToken,
        u: NodeId,
        v: NodeId,
    },
    #[error("exclusive mode schedules exactly one walk, got {0}")]
    NotExclusive(usize),
    #[error(transparent)]
    Walk(#[from] crate::walk::WalkError),
}

/// Message counters by category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub classical: u64,
    pub walk: u64,
    pub grover: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.classical + self.walk + self.grover
    }

    fn add(&mut self, other: &Counts) {
        self.classical += other.classical;
        self.walk += other.walk;
        self.grover += other.grover;
    }
}

/// Per-phase totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub messages: Counts,
    pub rounds: u64,
}

/// One replayable message record. Every charged message expands to exactly
/// one adjacency-array query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MessageEvent {
    /// One classical message from `from` over `port`.
    Classical { from: NodeId, port: Port },
    /// `steps * msgs_per_step` walk messages, replayed from a representative
    /// arc of the walk's network.
    WalkSteps { rep: Option<(NodeId, Port)>, steps: u64, msgs_per_step: u64 },
    /// `pairs` query/reply exchanges of a Grover search owned by `owner`.
    Grover { owner: NodeId, port: Port, pairs: u64 },
}

impl MessageEvent {
    pub fn message_count(&self) -> u64 {
        match self {
            MessageEvent::Classical { .. } => 1,
            MessageEvent::WalkSteps { steps, msgs_per_step, .. } => steps * msgs_per_step,
            MessageEvent::Grover { pairs, .. } => 2 * pairs,
        }
    }
}

/// Bounded event log. When the cap is hit the transcript marks itself
/// incomplete and stops recording; the ledger keeps counting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transcript {
    pub events: Vec<MessageEvent>,
    pub complete: bool,
    cap: usize,
}

impl Transcript {
    pub fn new(cap: usize) -> Self {
        Transcript { events: Vec::new(), complete: true, cap }
    }

    fn push(&mut self, ev: MessageEvent) {
        if self.events.len() < self.cap {
            self.events.push(ev);
        } else {
            self.complete = false;
        }
    }
}

/// Per-round, per-category message accounting.
#[derive(Debug, Clone)]
pub struct MessageLedger {
    rounds: u64,
    totals: Counts,
    phases: BTreeMap<String, PhaseStats>,
    window: VecDeque<(u64, Counts)>,
    window_cap: usize,
    round_open: Option<Counts>,
    transcript: Option<Transcript>,
}

impl MessageLedger {
    pub fn new(window_cap: usize) -> Self {
        MessageLedger {
            rounds: 0,
            totals: Counts::default(),
            phases: BTreeMap::new(),
            window: VecDeque::new(),
            window_cap,
            round_open: None,
            transcript: None,
        }
    }

    /// Enables the transcript with the given event cap.
    pub fn with_transcript(mut self, cap: usize) -> Self {
        self.transcript = Some(Transcript::new(cap));
        self
    }

    pub fn transcript(&self) -> Option<&Transcript> {
        self.transcript.as_ref()
    }

    pub fn totals(&self) -> Counts {
        self.totals
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn phases(&self) -> &BTreeMap<String, PhaseStats> {
        &self.phases
    }

    /// Recent per-round counters (most recent last).
    pub fn recent_rounds(&self) -> impl Iterator<Item = &(u64, Counts)> {
        self.window.iter()
    }

    fn bump(&mut self, phase: &str, delta: Counts) {
        self.totals.add(&delta);
        self.phases.entry(phase.to_string()).or_default().messages.add(&delta);
        if let Some(open) = &mut self.round_open {
            open.add(&delta);
        }
    }

    pub fn charge_classical(
        &mut self,
        phase: &str,
        msgs: impl IntoIterator<Item = (NodeId, Port)>,
    ) {
        let mut count = 0;
        for (from, port) in msgs {
            count += 1;
            if let Some(t) = &mut self.transcript {
                t.push(MessageEvent::Classical { from, port });
            }
        }
        self.bump(phase, Counts { classical: count, ..Default::default() });
    }

    pub fn charge_walk_steps(
        &mut self,
        phase: &str,
        rep: Option<(NodeId, Port)>,
        steps: u64,
        msgs_per_step: u64,
    ) {
        if steps * msgs_per_step == 0 {
            return;
        }
        if let Some(t) = &mut self.transcript {
            t.push(MessageEvent::WalkSteps { rep, steps, msgs_per_step });
        }
        self.bump(phase, Counts { walk: steps * msgs_per_step, ..Default::default() });
    }

    pub fn charge_grover(&mut self, phase: &str, owner: NodeId, port: Port, pairs: u64) {
        if pairs == 0 {
            return;
        }
        if let Some(t) = &mut self.transcript {
            t.push(MessageEvent::Grover { owner, port, pairs });
        }
        self.bump(phase, Counts { grover: 2 * pairs, ..Default::default() });
    }

    /// Advances the round counter in bulk (walks, subphase schedules).
    pub fn advance_rounds(&mut self, phase: &str, rounds: u64) {
        self.rounds += rounds;
        self.phases.entry(phase.to_string()).or_default().rounds += rounds;
    }

    /// Starts per-round tracking for one genuinely simulated round.
    pub(crate) fn begin_round(&mut self) {
        self.round_open = Some(Counts::default());
    }

    pub(crate) fn end_round(&mut self, phase: &str) {
        let counts = self.round_open.take().unwrap_or_default();
        self.rounds += 1;
        self.phases.entry(phase.to_string()).or_default().rounds += 1;
        if self.window.len() == self.window_cap {
            self.window.pop_front();
        }
        self.window.push_back((self.rounds - 1, counts));
    }

    /// Checks ledger conservation: category totals equal the per-phase sums.
    pub fn conserved(&self) -> bool {
        let mut acc = Counts::default();
        for stats in self.phases.values() {
            acc.add(&stats.messages);
        }
        acc == self.totals
    }
}

/// Serializable ledger summary, embedding run identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerExport {
    pub run_id: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub algorithm: String,
    pub rounds: u64,
    pub messages: MessageTotals,
    pub phases: Vec<PhaseExport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MessageTotals {
    pub classical: u64,
    pub walk: u64,
    pub grover: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseExport {
    pub phase: String,
    pub classical: u64,
    pub walk: u64,
    pub grover: u64,
    pub rounds: u64,
}

/// Versioned CSV header matching [`LedgerExport::csv_row`].
pub const CSV_SCHEMA: &str = "schema=qroute-sweep-v1";
pub const CSV_HEADER: &str = "run_id,algorithm,n,m,seed,rounds,classical,walk,grover,total";

impl MessageLedger {
    pub fn export(
        &self,
        run_id: &str,
        seed: u64,
        n: usize,
        m: usize,
        algorithm: &str,
    ) -> LedgerExport {
        LedgerExport {
            run_id: run_id.to_string(),
            seed,
            n,
            m,
            algorithm: algorithm.to_string(),
            rounds: self.rounds,
            messages: MessageTotals {
                classical: self.totals.classical,
                walk: self.totals.walk,
                grover: self.totals.grover,
                total: self.totals.total(),
            },
            phases: self
                .phases
                .iter()
                .map(|(name, s)| PhaseExport {
                    phase: name.clone(),
                    classical: s.messages.classical,
                    walk: s.messages.walk,
                    grover: s.messages.grover,
                    rounds: s.rounds,
                })
                .collect(),
        }
    }
}

impl LedgerExport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.run_id,
            self.algorithm,
            self.n,
            self.m,
            self.seed,
            self.rounds,
            self.messages.classical,
            self.messages.walk,
            self.messages.grover,
            self.messages.total
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_conservation() {
        let mut ledger = MessageLedger::new(16);
        ledger.charge_classical("a", vec![(0, 0), (1, 1)]);
        ledger.charge_walk_steps("b", Some((0, 0)), 10, 3);
        ledger.charge_grover("a", 2, 0, 4);
        assert!(ledger.conserved());
        assert_eq!(ledger.totals().classical, 2);
        assert_eq!(ledger.totals().walk, 30);
        assert_eq!(ledger.totals().grover, 8);
        assert_eq!(ledger.totals().total(), 40);
    }

    #[test]
    fn transcript_counts_match_charges() {
        let mut ledger = MessageLedger::new(4).with_transcript(1000);
        ledger.charge_classical("x", vec![(0, 1)]);
        ledger.charge_walk_steps("x", Some((2, 0)), 5, 1);
        ledger.charge_grover("x", 3, 1, 2);
        let total: u64 =
            ledger.transcript().unwrap().events.iter().map(|e| e.message_count()).sum();
        assert_eq!(total, ledger.totals().total());
    }

    #[test]
    fn transcript_cap_marks_incomplete() {
        let mut ledger = MessageLedger::new(4).with_transcript(1);
        ledger.charge_classical("x", vec![(0, 0), (0, 0)]);
        assert!(!ledger.transcript().unwrap().complete);
        assert_eq!(ledger.totals().classical, 2);
    }

    proptest::proptest! {
        #[test]
        fn conservation_under_random_charges(ops in proptest::collection::vec((0u8..3, 1u64..50), 1..40)) {
            let mut ledger = MessageLedger::new(8);
            for (kind, amount) in ops {
                let phase = if amount % 2 == 0 { "a" } else { "b" };
                match kind {
                    0 => ledger.charge_classical(phase, (0..amount).map(|i| (i as usize, 0))),
                    1 => ledger.charge_walk_steps(phase, Some((0, 0)), amount, 3),
                    _ => ledger.charge_grover(phase, 1, 0, amount),
                }
            }
            proptest::prop_assert!(ledger.conserved());
        }
    }

    #[test]
    fn export_round_trip() {
        let mut ledger = MessageLedger::new(4);
        ledger.charge_classical("p", vec![(0, 0)]);
        ledger.advance_rounds("p", 3);
        let export = ledger.export("run-1", 7, 5, 4, "mst");
        let json = serde_json::to_string(&export).unwrap();
        let back: LedgerExport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.messages.total, 1);
        assert_eq!(back.rounds, 3);
        assert!(back.csv_row().starts_with("run-1,mst,5,4,7,3,1,0,0,1"));
    }
}
