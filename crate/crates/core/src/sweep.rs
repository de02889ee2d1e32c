//! Parameter sweeps and log-log scaling fits.
//!
//! Sweeps run in cost-model fidelity so message totals are exact while
//! quantum outcomes resolve classically; runs fan out across a worker pool
//! with per-run seeds and merge in run order.

use crate::algorithms::{bfs, mst, AlgoError, AlgoOptions};
use crate::graph::generate::{gen_random_connected, GenError};
use crate::sim::{Fidelity, LedgerExport};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// The regression abscissa: `n` for MST, `sqrt(m n)` for BFS.
    pub x: f64,
    pub total_messages: u64,
    pub export: LedgerExport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub algorithm: String,
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of a 95% confidence interval on the slope.
    pub slope_ci: f64,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("empty grid")]
    EmptyGrid,
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
}

/// Least-squares fit of `ln y` against `ln x`: returns (slope, intercept,
/// 95% CI half-width of the slope).
pub fn fit_loglog(points: &[(f64, f64)]) -> (f64, f64, f64) {
    assert!(points.len() >= 2);
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ci = if logs.len() > 2 {
        let sse: f64 = logs
            .iter()
            .map(|p| {
                let r = p.1 - (intercept + slope * p.0);
                r * r
            })
            .sum();
        let se = (sse / (n - 2.0) / sxx).sqrt();
        1.96 * se
    } else {
        f64::INFINITY
    };
    (slope, intercept, ci)
}

/// Dense-family edge count: `m = floor(n^2 / 4)`, clamped to simple-graph
/// range.
pub fn dense_m(n: usize) -> usize {
    (n * n / 4).clamp(n - 1, n * (n - 1) / 2)
}

fn base_options(seed: u64) -> AlgoOptions {
    AlgoOptions { fidelity: Some(Fidelity::CostModel), seed, ..AlgoOptions::default() }
}

/// MST sweep over the dense family: abscissa `n`.
pub fn mst_sweep(ns: &[usize], reps: u64, seed: u64) -> Result<SweepSummary, SweepError> {
    if ns.is_empty() || reps == 0 {
        return Err(SweepError::EmptyGrid);
    }
    let mut jobs = Vec::new();
    for &n in ns {
        for r in 0..reps {
            jobs.push((n, seed ^ (n as u64) << 20 ^ r));
        }
    }
    let points: Result<Vec<SweepPoint>, SweepError> = jobs
        .par_iter()
        .map(|&(n, run_seed)| {
            let m = dense_m(n);
            let g = gen_random_connected(n, m, true, run_seed)?;
            let (_, ledger, _) = mst(&g, &base_options(run_seed))?;
            let export = ledger.export(
                &format!("mst-{n}-{run_seed:x}"),
                run_seed,
                n,
                m,
                "mst",
            );
            Ok(SweepPoint {
                n,
                m,
                seed: run_seed,
                x: n as f64,
                total_messages: export.messages.total,
                export,
            })
        })
        .collect();
    summarize("mst", points?)
}

/// BFS sweep over the dense family: abscissa `sqrt(m n)`.
pub fn bfs_sweep(ns: &[usize], reps: u64, seed: u64) -> Result<SweepSummary, SweepError> {
    if ns.is_empty() || reps == 0 {
        return Err(SweepError::EmptyGrid);
    }
    let mut jobs = Vec::new();
    for &n in ns {
        for r in 0..reps {
            jobs.push((n, seed ^ (n as u64) << 20 ^ r));
        }
    }
    let points: Result<Vec<SweepPoint>, SweepError> = jobs
        .par_iter()
        .map(|&(n, run_seed)| {
            let m = dense_m(n);
            let g = gen_random_connected(n, m, false, run_seed)?;
            let (_, _, ledger, _) = bfs(&g, 0, &base_options(run_seed))?;
            let export =
                ledger.export(&format!("bfs-{n}-{run_seed:x}"), run_seed, n, m, "bfs");
            Ok(SweepPoint {
                n,
                m,
                seed: run_seed,
                x: ((m as f64) * (n as f64)).sqrt(),
                total_messages: export.messages.total,
                export,
            })
        })
        .collect();
    summarize("bfs", points?)
}

fn summarize(algorithm: &str, mut points: Vec<SweepPoint>) -> Result<SweepSummary, SweepError> {
    points.sort_by_key(|a| (a.n, a.seed));
    let xy: Vec<(f64, f64)> =
        points.iter().map(|p| (p.x, p.total_messages.max(1) as f64)).collect();
    let (slope, intercept, slope_ci) = fit_loglog(&xy);
    Ok(SweepSummary { algorithm: algorithm.to_string(), slope, intercept, slope_ci, points })
}

/// CSV lines (schema header, column header, one row per point).
pub fn to_csv(summary: &SweepSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", crate::sim::CSV_SCHEMA));
    out.push_str(crate::sim::CSV_HEADER);
    out.push('\n');
    for p in &summary.points {
        out.push_str(&p.export.csv_row());
        out.push('\n');
    }
    out
}
