//! Grover search over a node's ports with an unknown number of marked
//! elements.
//!
//! The schedule is the classic geometric one for unknown solution counts:
//! stage `s` caps the iteration count at `ceil(growth^s)` (growth 6/5),
//! draws `j` uniformly below the cap, and measures; once the cap reaches
//! `ceil(1/sqrt(eps))` a few extra stages run at the cap before the
//! repetition gives up. Success of a stage is sampled from the exact
//! `sin^2((2j+1) theta)` law with `sin(theta) = sqrt(t_f/|X|)`, which is
//! distributionally identical to simulating the amplitudes for a
//! single-token search and stays cheap at any scale. A found element is
//! verified with one final check before being reported, so an unmarked
//! element is never returned.

use super::PrimitiveError;
use crate::config::RunConstants;
use crate::graph::{NodeId, Port};
use crate::sim::MessageLedger;
use rand::Rng;

/// One search task owned by a node.
pub struct GroverTask<'a> {
    pub owner: NodeId,
    /// Search domain: a subset of the owner's ports.
    pub domain: Vec<Port>,
    /// Ground-truth marked predicate, resolved per port.
    pub marked: &'a dyn Fn(Port) -> bool,
    /// Promised lower bound on the marked fraction (when nonzero).
    pub epsilon: f64,
    /// Failure probability bound.
    pub alpha: f64,
    /// Messages per checking exchange (query out, reply back).
    pub check_messages: u64,
    /// Rounds per checking exchange.
    pub check_rounds: u64,
}

impl<'a> GroverTask<'a> {
    /// Task over all ports of a node of the given degree, default checking
    /// costs from `constants`.
    pub fn over_ports(
        owner: NodeId,
        degree: usize,
        marked: &'a dyn Fn(Port) -> bool,
        alpha: f64,
        constants: &RunConstants,
    ) -> Self {
        GroverTask {
            owner,
            domain: (0..degree).collect(),
            marked,
            epsilon: 1.0 / degree.max(1) as f64,
            alpha,
            check_messages: constants.check_messages,
            check_rounds: constants.check_rounds,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroverOutcome {
    pub found: Option<Port>,
    /// Grover iterations executed across all stages and repetitions.
    pub iterations: u64,
    pub messages: u64,
    pub rounds: u64,
}

/// Runs the search, charging `2 * check_messages` per iteration plus one
/// check per stage measurement and one final verification.
pub fn distributed_grover<R: Rng>(
    task: &GroverTask,
    constants: &RunConstants,
    rng: &mut R,
    ledger: &mut MessageLedger,
    phase: &str,
) -> Result<GroverOutcome, PrimitiveError> {
    if task.domain.is_empty() {
        return Err(PrimitiveError::Grover("empty domain".into()));
    }
    if !(task.epsilon > 0.0 && task.epsilon <= 1.0) {
        return Err(PrimitiveError::Grover(format!("epsilon {} out of range", task.epsilon)));
    }
    if !(task.alpha > 0.0 && task.alpha < 1.0) {
        return Err(PrimitiveError::Grover(format!("alpha {} out of range", task.alpha)));
    }
    if !task.check_messages.is_multiple_of(2) {
        return Err(PrimitiveError::Grover("checking cost must be query/reply pairs".into()));
    }
    let size = task.domain.len();
    let marked: Vec<Port> = task.domain.iter().copied().filter(|&p| (task.marked)(p)).collect();
    let theta = (marked.len() as f64 / size as f64).sqrt().asin();
    let cap = (1.0 / task.epsilon.sqrt()).ceil().max(1.0) as u64;
    let reps = constants.grover_reps(task.alpha);
    let pairs_per_check = task.check_messages / 2;
    let rep_port = task.domain[0];

    let mut iterations = 0u64;
    let mut messages = 0u64;
    let mut rounds = 0u64;
    let mut found = None;
    'reps: for _ in 0..reps {
        let mut stage = 0u32;
        let mut at_cap = 0u32;
        loop {
            let m_s = (constants.grover_growth.powi(stage as i32).ceil() as u64).min(cap);
            if m_s == cap {
                at_cap += 1;
            }
            let j = rng.gen_range(0..m_s);
            // j oracle iterations (compute + uncompute each) and one
            // measurement check.
            let pairs = 2 * j * pairs_per_check + pairs_per_check;
            ledger.charge_grover(phase, task.owner, rep_port, pairs);
            messages += 2 * pairs;
            rounds += (2 * j + 1) * task.check_rounds;
            iterations += j;
            let p_success = ((2 * j + 1) as f64 * theta).sin().powi(2);
            if !marked.is_empty() && rng.gen_bool(p_success.clamp(0.0, 1.0)) {
                let hit = marked[rng.gen_range(0..marked.len())];
                // Final classical verification of the measured element.
                ledger.charge_grover(phase, task.owner, hit, pairs_per_check);
                messages += task.check_messages;
                rounds += task.check_rounds;
                found = Some(hit);
                break 'reps;
            }
            if at_cap > constants.grover_cap_extra {
                break;
            }
            stage += 1;
        }
    }
    ledger.advance_rounds(phase, rounds);
    Ok(GroverOutcome { found, iterations, messages, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run_once(
        degree: usize,
        marked_ports: &[Port],
        alpha: f64,
        seed: u64,
    ) -> (GroverOutcome, u64) {
        let constants = RunConstants::default();
        let marked = marked_ports.to_vec();
        let pred = move |p: Port| marked.contains(&p);
        let task = GroverTask::over_ports(0, degree, &pred, alpha, &constants);
        let mut ledger = MessageLedger::new(8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = distributed_grover(&task, &constants, &mut rng, &mut ledger, "grover").unwrap();
        assert_eq!(ledger.totals().grover, out.messages);
        (out, ledger.totals().grover)
    }

    #[test]
    fn single_marked_on_star_found_whp() {
        let mut hits = 0;
        let trials = 200;
        for seed in 0..trials {
            let (out, _) = run_once(63, &[17], 0.05, seed);
            if out.found == Some(17) {
                hits += 1;
            }
        }
        assert!(hits as f64 >= 0.95 * trials as f64 - 3.0 * (trials as f64 * 0.05).sqrt());
    }

    #[test]
    fn never_returns_unmarked() {
        for seed in 0..100 {
            let (out, _) = run_once(40, &[3, 9], 0.2, seed);
            if let Some(p) = out.found {
                assert!(p == 3 || p == 9);
            }
        }
    }

    #[test]
    fn no_marked_returns_none_after_full_schedule() {
        let (out, msgs) = run_once(25, &[], 0.1, 5);
        assert_eq!(out.found, None);
        assert!(msgs > 0);
    }

    #[test]
    fn all_marked_succeeds_cheaply() {
        // theta = pi/2: the very first measurement succeeds.
        let (out, msgs) = run_once(10, &(0..10).collect::<Vec<_>>(), 0.1, 7);
        assert!(out.found.is_some());
        assert_eq!(out.iterations, 0);
        // One measurement check plus the final verification.
        assert_eq!(msgs, 4);
    }

    #[test]
    fn empty_domain_rejected() {
        let constants = RunConstants::default();
        let pred = |_: Port| false;
        let task = GroverTask {
            owner: 0,
            domain: vec![],
            marked: &pred,
            epsilon: 0.5,
            alpha: 0.1,
            check_messages: 2,
            check_rounds: 2,
        };
        let mut ledger = MessageLedger::new(8);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(distributed_grover(&task, &constants, &mut rng, &mut ledger, "g").is_err());
    }
}
