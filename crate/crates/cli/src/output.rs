//! Run manifests and result-file writing.

use qroute_core::sim::LedgerExport;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Everything needed to reproduce a run, embedded in every output file.
#[derive(Serialize)]
pub struct Manifest {
    pub schema: &'static str,
    pub run_id: String,
    pub algorithm: String,
    pub seed: u64,
    pub delta: f64,
    pub fidelity: String,
    pub n: usize,
    pub m: usize,
    pub graph_hash: String,
    pub constants: qroute_core::RunConstants,
    pub args: Vec<String>,
}

impl Manifest {
    pub fn new(
        algorithm: &str,
        seed: u64,
        delta: f64,
        fidelity: &str,
        graph: &qroute_core::PortedGraph,
    ) -> Manifest {
        Manifest {
            schema: "qroute-run-v1",
            run_id: format!("{algorithm}-{:016x}", graph.content_hash() ^ seed),
            algorithm: algorithm.to_string(),
            seed,
            delta,
            fidelity: fidelity.to_string(),
            n: graph.node_count(),
            m: graph.edge_count(),
            graph_hash: format!("{:016x}", graph.content_hash()),
            constants: qroute_core::RunConstants::default(),
            args: std::env::args().collect(),
        }
    }
}

#[derive(Serialize)]
pub struct RunRecord<T: Serialize> {
    pub manifest: Manifest,
    pub result: T,
    pub ledger: LedgerExport,
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value)?)?;
    Ok(path)
}
