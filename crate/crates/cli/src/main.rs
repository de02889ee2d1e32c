//! `qroute` — command-line front end: graph validation, effective
//! resistance, single algorithm runs, parameter sweeps, and lower-bound
//! enumeration.
//!
//! Exit codes: 0 success, 1 invariant violation or correctness error,
//! 2 usage error, 3 budget refusal.

mod commands;
mod gen;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qroute", version, about = "Quantum-routing distributed algorithm simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct GraphSource {
    /// Graph file (`n m weighted` header, one edge per line).
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generator name followed by k=v parameters, e.g.
    /// `--gen random n=32 m=100 weighted=1` or `--gen two-cliques n=5
    /// bridge=0,1,7,8` or `--gen bfs-hard n=6 d=3 perm-seed=7`.
    #[arg(long, num_args = 1.., value_name = "NAME [k=v ...]")]
    gen: Option<Vec<String>>,
    /// Seed for generators that take one (defaults to --seed).
    #[arg(long)]
    gen_seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check every structural invariant of a graph.
    Validate {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Effective resistance between a root and a marked set.
    Effres {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        root: usize,
        /// Marked nodes (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        marked: Vec<usize>,
    },
    /// Run one algorithm and write outputs, ledger, and manifest.
    Run {
        /// mst | le | broadcast | bfs | cover | findany | findmin | walk-detect
        algorithm: String,
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// exact | cost (defaults to exact up to 64 nodes).
        #[arg(long)]
        fidelity: Option<String>,
        /// Output directory for result files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Root node (bfs, broadcast, walk-detect).
        #[arg(long, default_value_t = 0)]
        root: usize,
        /// Marked nodes (walk-detect).
        #[arg(long, value_delimiter = ',')]
        marked: Vec<usize>,
        /// Cover parameters.
        #[arg(long)]
        kappa: Option<u32>,
        #[arg(long, default_value_t = 1)]
        width: u32,
        /// Cluster size estimate for findany/findmin (defaults to n).
        #[arg(long)]
        n_star: Option<usize>,
        /// Fail (exit 1) if the run uses more rounds than this.
        #[arg(long)]
        rounds_cap: Option<u64>,
        /// Write the (possibly generated) input graph to this file.
        #[arg(long)]
        dump_graph: Option<PathBuf>,
        /// Emit machine-readable JSON to stdout.
        #[arg(long)]
        json: bool,
    },
    /// Sweep an algorithm over a size grid (cost-model) and fit the
    /// log-log slope.
    Sweep {
        /// mst | bfs
        algorithm: String,
        /// Comma-separated node counts, e.g. 16,32,64,128.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Enumerate adversary-bound parameters for a hard-instance family.
    Lb {
        /// bfs | connectivity
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
