//! The electric-network walk operator and quantum phase detection.
//!
//! The walk lives on the directed arcs of the network plus a virtual pair of
//! arcs between the root `r` and its artificial sibling: the basis is
//! `(r, r*), (r*, r)` and `(u, v), (v, u)` for every network edge. One step
//! applies, for every non-marked vertex `u`, the reflection about the
//! orthogonal complement of a weighted port superposition on `u`'s outgoing
//! arcs, then reverses every arc with a global sign flip. Marked vertices
//! diffuse as the identity, which is what detection exploits: with marked
//! vertices present the start state largely lies in the 1-eigenspace, without
//! them its phases spread out, and a classically controlled power of the
//! operator (quantum phase detection) separates the two cases.

pub mod spectral;

use crate::config::RunConstants;
use crate::electric::{ElectricError, ElectricNetwork};
use crate::graph::NodeId;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A basis arc. `Virtual` marks the two arcs of the root's virtual edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arc {
    /// Arc from `tail` to `head` along a network edge.
    Real { tail: NodeId, head: NodeId },
    /// `r -> r*` when `outward`, `r* -> r` otherwise.
    Virtual { outward: bool },
}

/// Indexed arc basis of a walk.
#[derive(Debug, Clone)]
pub struct WalkSpace {
    arcs: Vec<Arc>,
    rev: Vec<usize>,
    root: NodeId,
}

impl WalkSpace {
    pub fn dimension(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn reverse_of(&self, i: usize) -> usize {
        self.rev[i]
    }

    pub fn index_of(&self, arc: Arc) -> Option<usize> {
        self.arcs.iter().position(|a| *a == arc)
    }
}

/// Complex amplitude vector over a walk space basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub amplitudes: Vec<Complex64>,
}

impl WalkState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("parameters must satisfy R >= 1 and C1 >= 1 (got R={0}, C1={1})")]
    BadParameters(f64, f64),
    #[error("walk length must be at least 1")]
    TooFewSteps,
    #[error("state dimension {0} does not match walk space dimension {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} exceeds the dense audit limit {1}; use property tests at smaller scale")]
    DimensionTooLarge(usize, usize),
    #[error("total weight {actual} exceeds the declared bound {bound}")]
    WeightBoundViolated { actual: f64, bound: f64 },
    #[error("effective resistance {actual} exceeds the declared bound {bound}")]
    ResistanceBoundViolated { actual: f64, bound: f64 },
    #[error(transparent)]
    Electric(#[from] ElectricError),
}

struct Block {
    start: usize,
    psi_hat: Vec<f64>,
}

/// Applicable representation of the walk operator for one network.
pub struct WalkOperator {
    space: WalkSpace,
    blocks: Vec<Block>,
    r_bound: f64,
    c1: f64,
}

/// Minimal scalar abstraction so the hot loop runs on `f64` (detection, the
/// start state is real and the operator is real-orthogonal) and on
/// `Complex64` (public states, eigenvector checks).
pub trait WalkScalar: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn neg(self) -> Self;
}

impl WalkScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn neg(self) -> Self {
        -self
    }
}

impl WalkScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn neg(self) -> Self {
        -self
    }
}

/// Builds the walk operator for a network with resistance bound `r_bound`
/// and virtual-edge constant `c1`.
pub fn build_walk_operator(
    net: &ElectricNetwork,
    r_bound: f64,
    c1: f64,
) -> Result<WalkOperator, WalkError> {
    if r_bound < 1.0 || c1 < 1.0 {
        return Err(WalkError::BadParameters(r_bound, c1));
    }
    for e in &net.edges {
        if e.weight <= 0.0 || !e.weight.is_finite() {
            return Err(WalkError::Electric(ElectricError::NonPositiveWeight(
                e.u, e.v, e.weight,
            )));
        }
    }
    // Incident arc lists grouped by tail vertex, vertices in sorted order.
    let nodes = net.nodes();
    let mut incident: std::collections::BTreeMap<NodeId, Vec<(NodeId, f64, usize)>> =
        nodes.iter().map(|&v| (v, Vec::new())).collect();
    for (e, edge) in net.edges.iter().enumerate() {
        incident.get_mut(&edge.u).unwrap().push((edge.v, edge.weight, e));
        incident.get_mut(&edge.v).unwrap().push((edge.u, edge.weight, e));
    }
    let mut arcs = Vec::new();
    let mut blocks = Vec::new();
    // arc_slot[e] = (index of u->v arc, index of v->u arc) for edge e.
    let mut arc_slot = vec![(usize::MAX, usize::MAX); net.edges.len()];
    for (&u, inc) in incident.iter() {
        let start = arcs.len();
        let mut psi = Vec::with_capacity(inc.len() + 1);
        for &(head, w, e) in inc {
            if net.edges[e].u == u {
                arc_slot[e].0 = arcs.len();
            } else {
                arc_slot[e].1 = arcs.len();
            }
            arcs.push(Arc::Real { tail: u, head });
            psi.push(w.sqrt());
        }
        if u == net.root {
            arcs.push(Arc::Virtual { outward: true });
            psi.push(1.0 / (c1 * r_bound).sqrt());
        }
        if !net.is_marked(u) {
            let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut psi {
                *x /= norm;
            }
            blocks.push(Block { start, psi_hat: psi });
        }
    }
    let virt_out = arcs
        .iter()
        .position(|a| matches!(a, Arc::Virtual { outward: true }))
        .expect("root emits a virtual arc");
    let virt_in = arcs.len();
    arcs.push(Arc::Virtual { outward: false });
    let mut rev = vec![0usize; arcs.len()];
    for &(a, b) in &arc_slot {
        rev[a] = b;
        rev[b] = a;
    }
    rev[virt_out] = virt_in;
    rev[virt_in] = virt_out;
    Ok(WalkOperator {
        space: WalkSpace { arcs, rev, root: net.root },
        blocks,
        r_bound,
        c1,
    })
}

impl WalkOperator {
    pub fn space(&self) -> &WalkSpace {
        &self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn r_bound(&self) -> f64 {
        self.r_bound
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Amplitude the normalized root superposition assigns to the virtual
    /// arc (exposed for tests of the reflection structure).
    pub fn root_virtual_amplitude(&self) -> f64 {
        let root_block = self
            .blocks
            .iter()
            .find(|b| {
                (b.start..b.start + b.psi_hat.len())
                    .any(|i| matches!(self.space.arcs[i], Arc::Virtual { outward: true }))
            })
            .expect("root block exists unless the root is marked");
        *root_block.psi_hat.last().unwrap()
    }

    /// One in-place walk step on a raw amplitude slice.
    pub fn step_in_place<T: WalkScalar>(&self, x: &mut [T]) {
        debug_assert_eq!(x.len(), self.space.dimension());
        // Diffusion: rank-1 reflection per non-marked vertex block.
        for block in &self.blocks {
            let psi = &block.psi_hat;
            let seg = &mut x[block.start..block.start + psi.len()];
            let mut dot = T::zero();
            for (xi, &pi) in seg.iter().zip(psi) {
                dot = dot.add(xi.scale(pi));
            }
            for (xi, &pi) in seg.iter_mut().zip(psi) {
                *xi = xi.sub(dot.scale(2.0 * pi));
            }
        }
        // Negated arc reversal. `rev` is a fixed-point-free involution.
        let rev = &self.space.rev;
        for i in 0..x.len() {
            let j = rev[i];
            if i < j {
                x.swap(i, j);
            }
        }
        for xi in x.iter_mut() {
            *xi = xi.neg();
        }
    }

    /// One walk step on a complex state.
    pub fn apply_step(&self, state: &WalkState) -> Result<WalkState, WalkError> {
        if state.amplitudes.len() != self.space.dimension() {
            return Err(WalkError::DimensionMismatch(
                state.amplitudes.len(),
                self.space.dimension(),
            ));
        }
        let mut amps = state.amplitudes.clone();
        self.step_in_place(&mut amps);
        Ok(WalkState { amplitudes: amps })
    }

    /// The start state `(|r,r*> - |r*,r>)/sqrt(2)`.
    pub fn sigma_state(&self) -> WalkState {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.space.dimension()];
        let out = self.space.index_of(Arc::Virtual { outward: true }).unwrap();
        let inn = self.space.index_of(Arc::Virtual { outward: false }).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        amps[out] = Complex64::new(s, 0.0);
        amps[inn] = Complex64::new(-s, 0.0);
        WalkState { amplitudes: amps }
    }

    fn sigma_real(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.space.dimension()];
        let out = self.space.index_of(Arc::Virtual { outward: true }).unwrap();
        let inn = self.space.index_of(Arc::Virtual { outward: false }).unwrap();
        x[out] = std::f64::consts::FRAC_1_SQRT_2;
        x[inn] = -std::f64::consts::FRAC_1_SQRT_2;
        x
    }

    /// Exact probability that phase detection with `t_max` steps outputs 1
    /// on `state`: the average over `t` of `||(I - U^t) state||^2 / 4`,
    /// computed with one running application per step.
    pub fn qpd_outcome_distribution(
        &self,
        state: &WalkState,
        t_max: u64,
    ) -> Result<f64, WalkError> {
        if t_max < 1 {
            return Err(WalkError::TooFewSteps);
        }
        if state.amplitudes.len() != self.space.dimension() {
            return Err(WalkError::DimensionMismatch(
                state.amplitudes.len(),
                self.space.dimension(),
            ));
        }
        let x0 = &state.amplitudes;
        let mut x = x0.clone();
        let mut acc = 0.0;
        for _ in 0..t_max {
            self.step_in_place(&mut x);
            let diff: f64 = x0.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum();
            acc += diff / 4.0;
        }
        Ok(acc / t_max as f64)
    }

    /// Same average for the start state, on the real fast path.
    pub fn qpd_sigma_distribution(&self, t_max: u64) -> Result<f64, WalkError> {
        if t_max < 1 {
            return Err(WalkError::TooFewSteps);
        }
        let x0 = self.sigma_real();
        let mut x = x0.clone();
        let mut acc = 0.0;
        for _ in 0..t_max {
            self.step_in_place(&mut x);
            let diff: f64 = x0.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
            acc += diff / 4.0;
        }
        Ok(acc / t_max as f64)
    }

    /// One phase-detection sample: draw `t` uniformly from `1..=t_max`,
    /// output 1 with probability `||(I - U^t) state||^2 / 4`.
    pub fn qpd_sample<R: Rng>(
        &self,
        state: &WalkState,
        t_max: u64,
        rng: &mut R,
    ) -> Result<bool, WalkError> {
        if t_max < 1 {
            return Err(WalkError::TooFewSteps);
        }
        if state.amplitudes.len() != self.space.dimension() {
            return Err(WalkError::DimensionMismatch(
                state.amplitudes.len(),
                self.space.dimension(),
            ));
        }
        let t = rng.gen_range(1..=t_max);
        let x0 = &state.amplitudes;
        let mut x = x0.clone();
        for _ in 0..t {
            self.step_in_place(&mut x);
        }
        let p: f64 = x0.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / 4.0;
        Ok(rng.gen_bool(p.clamp(0.0, 1.0)))
    }
}

/// Closed form for the phase-detection output-1 probability on an
/// `exp(i*alpha)`-eigenvector with `t_max` steps: exactly 0 at `alpha = 0`,
/// otherwise `1/2 - sin(T a/2) cos((T+1) a/2) / (2 T sin(a/2))`.
pub fn qpd_closed_form(alpha: f64, t_max: u64) -> Result<f64, WalkError> {
    if t_max < 1 {
        return Err(WalkError::TooFewSteps);
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let t = t_max as f64;
    let p = 0.5
        - (t * alpha / 2.0).sin() * ((t + 1.0) * alpha / 2.0).cos()
            / (2.0 * t * (alpha / 2.0).sin());
    Ok(p)
}

/// Detection verdict for one network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkedVerdict {
    Empty,
    NonEmpty,
}

/// Result of a marked-vertex detection, with the quantities the message
/// accounting needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Detection {
    pub verdict: MarkedVerdict,
    /// Phase-detection trials run (`k`).
    pub trials: u64,
    /// Walk steps charged per trial (`T`).
    pub steps_per_trial: u64,
    /// Number of 1-outcomes among the trials (exact fidelity only).
    pub ones: Option<u64>,
    /// Exact per-trial output-1 probability (exact fidelity only).
    pub exact_p1: Option<f64>,
}

impl Detection {
    pub fn walk_steps_charged(&self) -> u64 {
        self.trials * self.steps_per_trial
    }
}

/// Decides whether the network's marked set is empty.
///
/// Runs `k = ceil(rep_constant * ln(1/delta))` independent phase-detection
/// trials at `T = ceil(t_factor * sqrt(1/2 + C1*R*W))` steps and thresholds
/// the count of 1-outcomes at `k/5`, the midpoint of the two cases'
/// guarantees. In cost-model fidelity the verdict is the classical
/// reachability answer and only the costs are reported.
pub fn detect_marked<R: Rng>(
    net: &ElectricNetwork,
    r_bound: f64,
    w_bound: f64,
    delta: f64,
    fidelity: crate::sim::Fidelity,
    constants: &RunConstants,
    rng: &mut R,
) -> Result<Detection, WalkError> {
    let trials = constants.detection_trials(delta);
    let steps = constants.walk_steps(r_bound, w_bound);
    match fidelity {
        crate::sim::Fidelity::CostModel => {
            let comp = net.component_of_root();
            let verdict = if net.marked.iter().any(|m| comp.contains(m)) {
                MarkedVerdict::NonEmpty
            } else {
                MarkedVerdict::Empty
            };
            Ok(Detection { verdict, trials, steps_per_trial: steps, ones: None, exact_p1: None })
        }
        crate::sim::Fidelity::Exact => {
            let actual_w = net.total_weight();
            if actual_w > w_bound * (1.0 + 1e-9) {
                return Err(WalkError::WeightBoundViolated { actual: actual_w, bound: w_bound });
            }
            if !net.marked.is_empty() && net.nodes().len() <= constants.audit_max_nodes {
                let reachable = {
                    let comp = net.component_of_root();
                    net.marked.iter().any(|m| comp.contains(m))
                };
                if reachable {
                    let reff = net.effective_resistance()?;
                    if reff > r_bound * (1.0 + 1e-9) {
                        return Err(WalkError::ResistanceBoundViolated {
                            actual: reff,
                            bound: r_bound,
                        });
                    }
                } else {
                    return Err(WalkError::ResistanceBoundViolated {
                        actual: f64::INFINITY,
                        bound: r_bound,
                    });
                }
            }
            let op = build_walk_operator(net, r_bound, constants.walk_c1)?;
            // Each trial draws its own t and then a Bernoulli with the
            // t-conditional probability; the marginal over t equals the
            // averaged distribution, so the trial outcomes are iid
            // Bernoulli(p1) and one running pass over t suffices.
            let p1 = op.qpd_sigma_distribution(steps)?;
            let mut ones = 0u64;
            for _ in 0..trials {
                if rng.gen_bool(p1.clamp(0.0, 1.0)) {
                    ones += 1;
                }
            }
            let verdict = if ones * 5 > trials {
                MarkedVerdict::Empty
            } else {
                MarkedVerdict::NonEmpty
            };
            Ok(Detection {
                verdict,
                trials,
                steps_per_trial: steps,
                ones: Some(ones),
                exact_p1: Some(p1),
            })
        }
    }
}
