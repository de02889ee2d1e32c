//! Query-counting adjacency-array oracle and the message-to-query replay.
//!
//! The oracle publishes node degrees and answers queries `(v, p)` with the
//! modified form `(u, q)`: not just the neighbor `u`, but also the port `q`
//! through which `u` sees `v` back. One counted query per message is exactly
//! what lifts message lower bounds: `replay_transcript` re-issues every
//! charged message of a protocol run as one oracle query and checks the
//! counts agree.

pub mod relations;

pub use relations::{bfs_relation_params, connectivity_relation_params, RelationParams};

use crate::graph::{NodeId, Port, PortedGraph};
use crate::sim::{MessageEvent, Transcript};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("query ({0}, {1}) addresses a port outside 0..{2}")]
    PortOutOfRange(NodeId, Port, usize),
    #[error("query references node {0} outside 0..{1}")]
    NodeOutOfRange(NodeId, usize),
}

/// Adjacency-array view of a hidden graph with a query counter.
pub struct QueryOracle<'g> {
    hidden: &'g PortedGraph,
    counter: u64,
    trace: Option<Vec<(NodeId, Port)>>,
}

impl<'g> QueryOracle<'g> {
    pub fn new(hidden: &'g PortedGraph) -> Self {
        QueryOracle { hidden, counter: 0, trace: None }
    }

    /// Enables the query trace (off by default; audits turn it on).
    pub fn with_trace(hidden: &'g PortedGraph) -> Self {
        QueryOracle { hidden, counter: 0, trace: Some(Vec::new()) }
    }

    /// The public part of the input: every node's degree.
    pub fn degrees(&self) -> Vec<usize> {
        self.hidden.degrees()
    }

    /// One modified query: `(v, p) -> (u, q)` with `f_v(p) = u` and
    /// `f_u(q) = v`. Increments the counter exactly once.
    pub fn query(&mut self, v: NodeId, p: Port) -> Result<(NodeId, Port), OracleError> {
        if v >= self.hidden.node_count() {
            return Err(OracleError::NodeOutOfRange(v, self.hidden.node_count()));
        }
        if p >= self.hidden.degree(v) {
            return Err(OracleError::PortOutOfRange(v, p, self.hidden.degree(v)));
        }
        self.counter += 1;
        if let Some(t) = &mut self.trace {
            t.push((v, p));
        }
        Ok((self.hidden.neighbor(v, p), self.hidden.inverse_port(v, p)))
    }

    pub fn count(&self) -> u64 {
        self.counter
    }

    pub fn trace(&self) -> Option<&[(NodeId, Port)]> {
        self.trace.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error("transcript is incomplete (event cap was hit)")]
    Incomplete,
    #[error("walk event lacks a representative arc")]
    MissingRepresentative,
    #[error("transcript references an unrevealed or invalid port: {0}")]
    TopologyLeak(OracleError),
}

/// Replays a protocol transcript against the oracle, issuing one modified
/// query per charged message, and returns the query count. The caller
/// asserts equality with the ledger's message total; a mismatch or an
/// invalid port means the simulator leaked topology somewhere.
pub fn replay_transcript(graph: &PortedGraph, transcript: &Transcript) -> Result<u64, ReplayError> {
    if !transcript.complete {
        return Err(ReplayError::Incomplete);
    }
    let mut oracle = QueryOracle::new(graph);
    for event in &transcript.events {
        match event {
            MessageEvent::Classical { from, port } => {
                oracle.query(*from, *port).map_err(ReplayError::TopologyLeak)?;
            }
            MessageEvent::WalkSteps { rep, steps, msgs_per_step } => {
                let (v, p) = rep.ok_or(ReplayError::MissingRepresentative)?;
                // Bounce between the representative arc's two directions,
                // one query per charged message.
                let mut side = (v, p);
                for _ in 0..(steps * msgs_per_step) {
                    let answer =
                        oracle.query(side.0, side.1).map_err(ReplayError::TopologyLeak)?;
                    side = answer;
                }
            }
            MessageEvent::Grover { owner, port, pairs } => {
                for _ in 0..*pairs {
                    let (u, q) =
                        oracle.query(*owner, *port).map_err(ReplayError::TopologyLeak)?;
                    oracle.query(u, q).map_err(ReplayError::TopologyLeak)?;
                }
            }
        }
    }
    Ok(oracle.count())
}
