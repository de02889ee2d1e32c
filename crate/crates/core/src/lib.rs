//! Simulator and analysis toolkit for quantum-routed distributed algorithms.
//!
//! The crate has three layers:
//!
//! - **Graph and electric-network machinery** ([`graph`], [`electric`]):
//!   port-numbered graphs, unit flows, effective resistance, and the
//!   generator families used throughout the test and benchmark suites.
//! - **Quantum layer** ([`walk`], [`primitives::grover`]): the electric-network
//!   walk operator, quantum phase detection, marked-vertex detection, and
//!   Grover search with the unknown-solution-count schedule. Walk outcomes can
//!   be resolved by exact state-vector simulation or, for large scaling runs,
//!   classically while charging identical message costs ([`sim::Fidelity`]).
//! - **Distributed layer** ([`sim`], [`primitives`], [`algorithms`]):
//!   a synchronous message-passing engine with exact message accounting,
//!   cluster primitives (convergecast, outgoing-edge finding), and the
//!   end-to-end algorithms: MST, leader election, broadcast, low-depth BFS
//!   exploration, sparse neighborhood covers, and full BFS.
//!
//! [`lowerbound`] holds the query-counting adjacency-array oracle, the
//! message-to-query replay harness, and brute-force enumeration of the
//! adversary-bound parameters on the two hard-instance families.
//!
//! [`oracle`] contains independent reference computations (quadratic-program
//! flow minimization, Kruskal, classical BFS) used by the test suites to
//! cross-check the main implementations. They deliberately avoid sharing code
//! paths with what they verify.

pub mod algorithms;
pub mod config;
pub mod electric;
pub mod graph;
pub mod lowerbound;
pub mod oracle;
pub mod primitives;
pub mod sim;
pub mod sweep;
pub mod walk;

pub use config::RunConstants;
pub use electric::{ElectricNetwork, UnitFlow, WalkToken};
pub use graph::{NodeId, Port, PortedGraph};
pub use sim::{Fidelity, MessageLedger};
