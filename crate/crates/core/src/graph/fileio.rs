//! Plain-text graph files.
//!
//! Format: a header line `n m weighted{0|1}`, then one line per edge
//! `u v` (or `u v w` when weighted). Port order equals file order, so
//! write-then-read reproduces the encoding exactly.

use super::{GraphError, PortedGraph};
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn write_graph<W: Write>(g: &PortedGraph, mut out: W) -> Result<(), FileError> {
    writeln!(
        out,
        "{} {} {}",
        g.node_count(),
        g.edge_count(),
        if g.is_weighted() { 1 } else { 0 }
    )?;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if g.is_weighted() {
            writeln!(out, "{} {} {}", u, v, g.edge_weight(e))?;
        } else {
            writeln!(out, "{} {}", u, v)?;
        }
    }
    Ok(())
}

pub fn read_graph<R: BufRead>(input: R) -> Result<PortedGraph, FileError> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| FileError::Parse(1, "empty file".into()))?;
    let header = header?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(FileError::Parse(1, "expected `n m weighted`".into()));
    }
    let bad = |line: usize, what: &str| FileError::Parse(line + 1, what.to_string());
    let n: usize = head[0].parse().map_err(|_| bad(0, "bad node count"))?;
    let m: usize = head[1].parse().map_err(|_| bad(0, "bad edge count"))?;
    let weighted = match head[2] {
        "0" => false,
        "1" => true,
        _ => return Err(bad(0, "weighted flag must be 0 or 1")),
    };
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(if weighted { m } else { 0 });
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let expect = if weighted { 3 } else { 2 };
        if parts.len() != expect {
            return Err(bad(idx, "wrong field count"));
        }
        let u = parts[0].parse().map_err(|_| bad(idx, "bad node id"))?;
        let v = parts[1].parse().map_err(|_| bad(idx, "bad node id"))?;
        edges.push((u, v));
        if weighted {
            weights.push(parts[2].parse().map_err(|_| bad(idx, "bad weight"))?);
        }
    }
    if edges.len() != m {
        return Err(FileError::Parse(
            edges.len() + 2,
            format!("expected {} edges, found {}", m, edges.len()),
        ));
    }
    let w = if weighted { Some(&weights[..]) } else { None };
    Ok(PortedGraph::from_edge_list(n, &edges, w)?)
}

pub fn read_graph_file(path: &std::path::Path) -> Result<PortedGraph, FileError> {
    let file = std::fs::File::open(path)?;
    read_graph(std::io::BufReader::new(file))
}

pub fn write_graph_file(g: &PortedGraph, path: &std::path::Path) -> Result<(), FileError> {
    let file = std::fs::File::create(path)?;
    write_graph(g, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::gen_random_connected;
    use proptest::prelude::*;

    fn round_trip(g: &PortedGraph) -> PortedGraph {
        let mut buf = Vec::new();
        write_graph(g, &mut buf).unwrap();
        read_graph(std::io::Cursor::new(buf)).unwrap()
    }

    #[test]
    fn header_mismatch_rejected() {
        let text = "2 2 0\n0 1\n";
        assert!(read_graph(std::io::Cursor::new(text)).is_err());
    }

    proptest! {
        #[test]
        fn write_read_is_identity(seed in any::<u64>(), n in 2usize..20, weighted in any::<bool>()) {
            let max = n * (n - 1) / 2;
            let m = (n - 1) + (seed as usize % (max + 2 - n)).min(max + 1 - n);
            let g = gen_random_connected(n, m, weighted, seed).unwrap();
            let h = round_trip(&g);
            prop_assert_eq!(g.content_hash(), h.content_hash());
            prop_assert_eq!(g.adjacency_arrays(), h.adjacency_arrays());
        }
    }
}
