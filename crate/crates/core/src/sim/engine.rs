//! Lock-step protocol execution for per-node programs.
//!
//! Messages sent in round `t` are delivered at round `t+1`. Every classical
//! message carries a payload of machine words (one poly(n)-bounded quantity
//! per word) and counts one message; exceeding the word budget is a hard
//! error since oversized payloads would invalidate the complexity claims.

use super::walksched::{schedule_walks, ScheduleMode, WalkRequest};
use super::{Fidelity, MessageLedger, SimError};
use crate::config::RunConstants;
use crate::electric::WalkToken;
use crate::graph::{NodeId, Port, PortedGraph};
use crate::walk::MarkedVerdict;

pub type Payload = Vec<u64>;

/// A message delivered to a node, tagged with the receiving port.
#[derive(Debug, Clone, PartialEq)]
pub struct Incoming {
    pub port: Port,
    pub payload: Payload,
}

/// Per-round output collector handed to a program.
pub struct NodeApi {
    sends: Vec<(Port, Payload)>,
    walks: Vec<WalkRequest>,
    terminated: bool,
}

impl NodeApi {
    pub fn send(&mut self, port: Port, payload: Payload) {
        self.sends.push((port, payload));
    }

    /// Submits a walk detection. All requests of a round form one batch,
    /// scheduled in marked-shared mode; the verdict arrives with the next
    /// round's input.
    pub fn request_walk(&mut self, request: WalkRequest) {
        self.walks.push(request);
    }

    /// Marks this node finished; a terminated node is never stepped again.
    pub fn terminate(&mut self) {
        self.terminated = true;
    }
}

/// A node's behavior: one transition per round.
pub trait NodeProgram {
    fn step(
        &mut self,
        node: NodeId,
        round: u64,
        inbox: &[Incoming],
        verdicts: &[(WalkToken, MarkedVerdict)],
        api: &mut NodeApi,
    );
}

impl<F> NodeProgram for F
where
    F: FnMut(NodeId, u64, &[Incoming], &[(WalkToken, MarkedVerdict)], &mut NodeApi),
{
    fn step(
        &mut self,
        node: NodeId,
        round: u64,
        inbox: &[Incoming],
        verdicts: &[(WalkToken, MarkedVerdict)],
        api: &mut NodeApi,
    ) {
        self(node, round, inbox, verdicts, api)
    }
}

/// Outcome of a protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub rounds: u64,
    pub all_terminated: bool,
}

/// Runs one program per node until every node terminates or `max_rounds`
/// passes. Deterministic given the seed: nodes are stepped in id order and
/// walk batches resolve in request order.
#[allow(clippy::too_many_arguments)]
pub fn run_protocol_with_walks(
    graph: &PortedGraph,
    programs: &mut [Box<dyn NodeProgram>],
    max_rounds: u64,
    fidelity: Fidelity,
    seed: u64,
    constants: &RunConstants,
    ledger: &mut MessageLedger,
    phase: &str,
) -> Result<ProtocolRun, SimError> {
    use rand::SeedableRng;
    assert_eq!(programs.len(), graph.node_count(), "one program per node");
    let n = graph.node_count();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut terminated = vec![false; n];
    let mut inboxes: Vec<Vec<Incoming>> = vec![Vec::new(); n];
    let mut verdicts: Vec<Vec<(WalkToken, MarkedVerdict)>> = vec![Vec::new(); n];
    let mut round = 0u64;
    loop {
        if round >= max_rounds {
            return Err(SimError::RoundCapExceeded(max_rounds));
        }
        ledger.begin_round();
        let mut next_inboxes: Vec<Vec<Incoming>> = vec![Vec::new(); n];
        let mut next_verdicts: Vec<Vec<(WalkToken, MarkedVerdict)>> = vec![Vec::new(); n];
        let mut batch: Vec<(NodeId, WalkRequest)> = Vec::new();
        let mut any_send = false;
        for v in 0..n {
            if terminated[v] {
                continue;
            }
            let mut api = NodeApi { sends: Vec::new(), walks: Vec::new(), terminated: false };
            programs[v].step(v, round, &inboxes[v], &verdicts[v], &mut api);
            terminated[v] = api.terminated;
            for request in api.walks {
                batch.push((v, request));
            }
            for (port, payload) in api.sends {
                if port >= graph.degree(v) {
                    return Err(SimError::InvalidPort { node: v, port });
                }
                if payload.len() > constants.word_budget {
                    return Err(SimError::PayloadTooLarge {
                        node: v,
                        words: payload.len(),
                        budget: constants.word_budget,
                    });
                }
                let target = graph.neighbor(v, port);
                let back = graph.inverse_port(v, port);
                ledger.charge_classical(phase, [(v, port)]);
                next_inboxes[target].push(Incoming { port: back, payload });
                any_send = true;
            }
        }
        if !batch.is_empty() {
            let requests: Vec<WalkRequest> = batch.iter().map(|(_, r)| r.clone()).collect();
            let outcomes = schedule_walks(
                &requests,
                ScheduleMode::MarkedShared,
                fidelity,
                constants,
                &mut rng,
                ledger,
                phase,
                None,
            )?;
            for ((owner, _), outcome) in batch.iter().zip(outcomes) {
                next_verdicts[*owner].push((outcome.token, outcome.verdict));
            }
            any_send = true;
        }
        let all_done = terminated.iter().all(|&t| t);
        if all_done && !any_send {
            // Nothing happened this round; do not count it.
            ledger.round_open = None;
            return Ok(ProtocolRun { rounds: round, all_terminated: true });
        }
        ledger.end_round(phase);
        round += 1;
        inboxes = next_inboxes;
        verdicts = next_verdicts;
        if all_done {
            return Ok(ProtocolRun { rounds: round, all_terminated: true });
        }
    }
}

/// [`run_protocol_with_walks`] for purely classical programs.
pub fn run_protocol(
    graph: &PortedGraph,
    programs: &mut [Box<dyn NodeProgram>],
    max_rounds: u64,
    constants: &RunConstants,
    ledger: &mut MessageLedger,
    phase: &str,
) -> Result<ProtocolRun, SimError> {
    run_protocol_with_walks(
        graph,
        programs,
        max_rounds,
        Fidelity::Exact,
        0,
        constants,
        ledger,
        phase,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{gen_complete, gen_path};

    // Forward over every port on first possession; each node transmits
    // through each of its ports exactly once, so a run totals 2m messages.
    struct Flood {
        degree: usize,
        has_item: bool,
        sent: bool,
    }

    impl NodeProgram for Flood {
        fn step(&mut self, _node: NodeId, _round: u64, inbox: &[Incoming], _verdicts: &[(WalkToken, MarkedVerdict)], api: &mut NodeApi) {
            if !self.has_item && !inbox.is_empty() {
                self.has_item = true;
            }
            if self.has_item && !self.sent {
                self.sent = true;
                for p in 0..self.degree {
                    api.send(p, vec![1]);
                }
            }
            if self.sent {
                api.terminate();
            }
        }
    }

    #[test]
    fn flooding_on_k5_charges_2m() {
        let g = gen_complete(5).unwrap();
        let mut programs: Vec<Box<dyn NodeProgram>> = (0..5)
            .map(|v| {
                Box::new(Flood { degree: g.degree(v), has_item: v == 0, sent: false })
                    as Box<dyn NodeProgram>
            })
            .collect();
        let constants = RunConstants::default();
        let mut ledger = MessageLedger::new(64);
        let run =
            run_protocol(&g, &mut programs, 100, &constants, &mut ledger, "flood").unwrap();
        assert!(run.all_terminated);
        // Convention: every node forwards over all its ports on first
        // possession, so the total is exactly 2m.
        assert_eq!(ledger.totals().classical, 2 * g.edge_count() as u64);
        assert!(ledger.conserved());
    }

    struct Convergecast {
        parent: Option<Port>,
        expected: usize,
        received: usize,
        sent: bool,
    }

    impl NodeProgram for Convergecast {
        fn step(&mut self, _node: NodeId, _round: u64, inbox: &[Incoming], _verdicts: &[(WalkToken, MarkedVerdict)], api: &mut NodeApi) {
            self.received += inbox.len();
            if self.received == self.expected && !self.sent {
                self.sent = true;
                if let Some(p) = self.parent {
                    api.send(p, vec![0]);
                }
                api.terminate();
            }
        }
    }

    #[test]
    fn convergecast_on_path_charges_n_minus_1() {
        let n = 7;
        let g = gen_path(n).unwrap();
        // Root is node 0; each node waits for its children (higher ids).
        let mut programs: Vec<Box<dyn NodeProgram>> = (0..n)
            .map(|v| {
                let parent = if v == 0 { None } else { g.port_to(v, v - 1) };
                let expected = if v == n - 1 { 0 } else { 1 };
                Box::new(Convergecast { parent, expected, received: 0, sent: false })
                    as Box<dyn NodeProgram>
            })
            .collect();
        let constants = RunConstants::default();
        let mut ledger = MessageLedger::new(64);
        let run = run_protocol(&g, &mut programs, 100, &constants, &mut ledger, "cc").unwrap();
        assert_eq!(ledger.totals().classical, (n - 1) as u64);
        assert_eq!(run.rounds, (n - 1) as u64);
    }

    struct Idle;
    impl NodeProgram for Idle {
        fn step(&mut self, _: NodeId, _: u64, _: &[Incoming], _verdicts: &[(WalkToken, MarkedVerdict)], api: &mut NodeApi) {
            api.terminate();
        }
    }

    #[test]
    fn empty_programs_finish_at_round_zero() {
        let g = gen_path(4).unwrap();
        let mut programs: Vec<Box<dyn NodeProgram>> =
            (0..4).map(|_| Box::new(Idle) as Box<dyn NodeProgram>).collect();
        let constants = RunConstants::default();
        let mut ledger = MessageLedger::new(64);
        let run = run_protocol(&g, &mut programs, 10, &constants, &mut ledger, "idle").unwrap();
        assert_eq!(run.rounds, 0);
        assert_eq!(ledger.totals().total(), 0);
    }

    struct BadSender;
    impl NodeProgram for BadSender {
        fn step(&mut self, _: NodeId, _: u64, _: &[Incoming], _verdicts: &[(WalkToken, MarkedVerdict)], api: &mut NodeApi) {
            api.send(17, vec![0]);
        }
    }

    #[test]
    fn invalid_port_is_hard_error() {
        let g = gen_path(2).unwrap();
        let mut programs: Vec<Box<dyn NodeProgram>> =
            vec![Box::new(BadSender), Box::new(Idle)];
        let constants = RunConstants::default();
        let mut ledger = MessageLedger::new(64);
        let err =
            run_protocol(&g, &mut programs, 10, &constants, &mut ledger, "x").unwrap_err();
        assert!(matches!(err, SimError::InvalidPort { node: 0, port: 17 }));
    }

    struct FatSender;
    impl NodeProgram for FatSender {
        fn step(&mut self, _: NodeId, _: u64, _: &[Incoming], _verdicts: &[(WalkToken, MarkedVerdict)], api: &mut NodeApi) {
            api.send(0, vec![0; 9]);
        }
    }

    #[test]
    fn oversized_payload_is_hard_error() {
        let g = gen_path(2).unwrap();
        let mut programs: Vec<Box<dyn NodeProgram>> =
            vec![Box::new(FatSender), Box::new(Idle)];
        let constants = RunConstants::default();
        let mut ledger = MessageLedger::new(64);
        let err =
            run_protocol(&g, &mut programs, 10, &constants, &mut ledger, "x").unwrap_err();
        assert!(matches!(err, SimError::PayloadTooLarge { node: 0, words: 9, budget: 4 }));
    }

    struct WalkAsker {
        asked: bool,
        verdict: Option<MarkedVerdict>,
    }

    impl NodeProgram for WalkAsker {
        fn step(
            &mut self,
            node: NodeId,
            _round: u64,
            _inbox: &[Incoming],
            verdicts: &[(WalkToken, MarkedVerdict)],
            api: &mut NodeApi,
        ) {
            if let Some((_, v)) = verdicts.first() {
                self.verdict = Some(*v);
                api.terminate();
                return;
            }
            if !self.asked && node == 0 {
                self.asked = true;
                let net = crate::electric::unit_network(&[(0, 1), (1, 2)], 0, [2]);
                api.request_walk(crate::sim::WalkRequest {
                    net,
                    r_bound: 2.0,
                    w_bound: 2.0,
                    delta: 0.05,
                    rep: Some((0, 0)),
                });
            } else if node != 0 {
                api.terminate();
            }
        }
    }

    #[test]
    fn walk_requests_resolve_next_round() {
        let g = gen_path(3).unwrap();
        let mut programs: Vec<Box<dyn NodeProgram>> = (0..3)
            .map(|_| Box::new(WalkAsker { asked: false, verdict: None }) as Box<dyn NodeProgram>)
            .collect();
        let constants = RunConstants::default();
        let mut ledger = MessageLedger::new(64);
        let run = super::run_protocol_with_walks(
            &g,
            &mut programs,
            20,
            crate::sim::Fidelity::Exact,
            5,
            &constants,
            &mut ledger,
            "walkreq",
        )
        .unwrap();
        assert!(run.all_terminated);
        // The walk's cost was merged into the ledger.
        let k = constants.detection_trials(0.05);
        let t = constants.walk_steps(2.0, 2.0);
        assert_eq!(ledger.totals().walk, 3 * k * t);
    }

    #[test]
    fn determinism_same_seedless_programs() {
        let g = gen_complete(6).unwrap();
        let run = |l: &mut MessageLedger| {
            let mut programs: Vec<Box<dyn NodeProgram>> = (0..6)
                .map(|v| {
                    Box::new(Flood { degree: g.degree(v), has_item: v == 2, sent: false })
                        as Box<dyn NodeProgram>
                })
                .collect();
            run_protocol(&g, &mut programs, 100, &RunConstants::default(), l, "flood").unwrap()
        };
        let mut l1 = MessageLedger::new(64).with_transcript(10_000);
        let mut l2 = MessageLedger::new(64).with_transcript(10_000);
        let r1 = run(&mut l1);
        let r2 = run(&mut l2);
        assert_eq!(r1.rounds, r2.rounds);
        assert_eq!(l1.totals(), l2.totals());
        assert_eq!(l1.transcript().unwrap().events, l2.transcript().unwrap().events);
    }
}
