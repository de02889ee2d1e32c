//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them on success).
//!
//! Tolerances and thresholds are pinned here, in code. Criterion 6 asserts
//! the scaling shape for both algorithms; the MST half measures above its
//! threshold under this charge model (see the test body for the analysis
//! summary) and is expected to fail honestly rather than being loosened.

use qroute_core::algorithms::{bfs, mst, sparse_cover, AlgoOptions};
use qroute_core::electric::{ElectricNetwork, WalkToken};
use qroute_core::graph::generate::{gen_random_connected, gen_star};
use qroute_core::lowerbound::{
    bfs_relation_params, connectivity_relation_params, replay_transcript,
};
use qroute_core::oracle::{bfs_distances, kruskal_mst, qp_min_energy_flow};
use qroute_core::primitives::{distributed_grover, GroverTask};
use qroute_core::sim::Fidelity;
use qroute_core::sweep::{bfs_sweep, mst_sweep};
use qroute_core::walk::spectral::{
    eigenpair_residual, overlap_low_phase, overlap_one_eigenspace, state_from, unit_eigenpairs,
};
use qroute_core::walk::{build_walk_operator, qpd_closed_form};
use qroute_core::{PortedGraph, RunConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn outcome(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} — {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Random unit-weight electric network over a connected random graph with a
/// random nonempty marked set avoiding the root.
fn random_instance(seed: u64, max_n: usize, max_m: usize) -> (ElectricNetwork, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=max_n);
    let cap = (n * (n - 1) / 2).min(max_m);
    let m = rng.gen_range(n - 1..=cap.max(n - 1));
    let g = gen_random_connected(n, m, false, seed ^ 0x9e37).unwrap();
    let marked_count = rng.gen_range(1..=3.min(n - 1));
    let mut marked = Vec::new();
    while marked.len() < marked_count {
        let v = rng.gen_range(1..n);
        if !marked.contains(&v) {
            marked.push(v);
        }
    }
    let net = ElectricNetwork::from_graph(&g, 0, marked, WalkToken::new(0, seed)).unwrap();
    let reff = net.effective_resistance().unwrap();
    let r = reff.max(1.0);
    let w = net.total_weight();
    (net, r, w)
}

#[test]
fn criterion_1_qpd_closed_form_on_eigenpairs() {
    let started = std::time::Instant::now();
    let mut checked = 0u32;
    let mut worst: f64 = 0.0;
    let t_choices = [1u64, 3, 7, 23, 64];
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=12usize);
        let cap = n * (n - 1) / 2;
        let m = rng.gen_range(n - 1..=cap);
        let g = gen_random_connected(n, m, false, seed).unwrap();
        let marked: Vec<usize> = if seed.is_multiple_of(3) { vec![n - 1] } else { vec![] };
        let net = ElectricNetwork::from_graph(&g, 0, marked, WalkToken::new(0, 0)).unwrap();
        let op = build_walk_operator(&net, 1.0 + (n as f64).log2(), 9.0).unwrap();
        for (alpha, vec) in unit_eigenpairs(&op).unwrap() {
            // Only genuine eigenpairs test the law; clustered eigenvalues can
            // defeat the extractor, and those vectors are not eigenvectors.
            if eigenpair_residual(&op, alpha, &vec) > 1e-10 {
                continue;
            }
            let state = state_from(&vec);
            let t = t_choices[checked as usize % t_choices.len()];
            let numeric = op.qpd_outcome_distribution(&state, t).unwrap();
            let closed = qpd_closed_form(alpha, t).unwrap();
            worst = worst.max((numeric - closed).abs());
            assert!(
                (numeric - closed).abs() < 1e-9,
                "alpha={alpha} t={t}: {numeric} vs {closed}"
            );
            checked += 1;
            if checked >= 200 {
                break;
            }
        }
    }
    for t in [1u64, 9, 100] {
        assert_eq!(qpd_closed_form(0.0, t).unwrap(), 0.0, "alpha = 0 is exactly 0");
    }
    let elapsed = started.elapsed().as_secs_f64();
    outcome(
        1,
        checked >= 200 && worst < 1e-9 && elapsed < 60.0,
        &format!("{checked} eigenpairs, worst deviation {worst:.2e}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_2_detection_gap() {
    let constants = RunConstants::default();
    let mut worst_empty: f64 = 1.0;
    let mut worst_marked: f64 = 0.0;
    for seed in 0..20u64 {
        let (net, r, w) = random_instance(1000 + seed, 20, 60);
        let t = constants.walk_steps(r, w);
        let marked_op = build_walk_operator(&net, r, 9.0).unwrap();
        let p_marked = marked_op.qpd_sigma_distribution(t).unwrap();
        let empty_net =
            ElectricNetwork::new(net.edges.clone(), net.root, [], net.token).unwrap();
        let empty_op = build_walk_operator(&empty_net, r, 9.0).unwrap();
        let p_empty = empty_op.qpd_sigma_distribution(t).unwrap();
        worst_marked = worst_marked.max(p_marked);
        worst_empty = worst_empty.min(p_empty);
        assert!(p_marked <= 0.1 + 1e-9, "seed {seed}: P(1 | marked) = {p_marked}");
        assert!(p_empty >= 0.3 - 1e-9, "seed {seed}: P(1 | empty) = {p_empty}");
    }
    outcome(
        2,
        worst_marked <= 0.1 + 1e-9 && worst_empty >= 0.3 - 1e-9,
        &format!(
            "20 instances: max P(1|marked) {worst_marked:.4} <= 1/10, min P(1|empty) {worst_empty:.4} >= 3/10"
        ),
    );
}

#[test]
fn criterion_3_overlap_bounds() {
    let constants = RunConstants::default();
    let mut min_marked_overlap_sq: f64 = 1.0;
    let mut max_empty_overlap: f64 = 0.0;
    for seed in 0..20u64 {
        let (net, r, w) = random_instance(2000 + seed, 20, 60);
        let marked_op = build_walk_operator(&net, r, 9.0).unwrap();
        assert!(marked_op.dimension() <= 500);
        let overlap = overlap_one_eigenspace(&marked_op).unwrap();
        min_marked_overlap_sq = min_marked_overlap_sq.min(overlap * overlap);
        assert!(
            overlap * overlap >= 0.9 - 1e-9,
            "seed {seed}: squared overlap {}",
            overlap * overlap
        );
        let empty_net =
            ElectricNetwork::new(net.edges.clone(), net.root, [], net.token).unwrap();
        let empty_op = build_walk_operator(&empty_net, r, 9.0).unwrap();
        let theta = 1.0 / (4.0 * (0.5 + constants.walk_c1 * r * w).sqrt());
        let low = overlap_low_phase(&empty_op, theta).unwrap();
        max_empty_overlap = max_empty_overlap.max(low);
        assert!(low <= 0.25 + 1e-9, "seed {seed}: low-phase overlap {low}");
    }
    outcome(
        3,
        min_marked_overlap_sq >= 0.9 - 1e-9 && max_empty_overlap <= 0.25 + 1e-9,
        &format!(
            "squared 1-eigenspace overlap >= {min_marked_overlap_sq:.4} (bound 0.9), low-phase overlap <= {max_empty_overlap:.4} (bound 0.25)"
        ),
    );
}

#[test]
fn criterion_4_effective_resistance_routes_agree() {
    // Series and parallel closed forms.
    let path = qroute_core::electric::unit_network(&[(0, 1), (1, 2), (2, 3)], 0, [3]);
    assert!((path.effective_resistance().unwrap() - 3.0).abs() < 1e-12);
    let parallel = ElectricNetwork::new(
        vec![qroute_core::electric::NetEdge { u: 0, v: 1, weight: 2.0, base_edge: None }],
        0,
        [1],
        WalkToken::new(0, 0),
    )
    .unwrap();
    assert!((parallel.effective_resistance().unwrap() - 0.5).abs() < 1e-12);
    // Laplacian route equals the quadratic-program route on every small
    // weighted instance.
    let mut worst: f64 = 0.0;
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let n = rng.gen_range(4..=12usize);
        let cap = n * (n - 1) / 2;
        let m = rng.gen_range(n - 1..=cap);
        let g = gen_random_connected(n, m, true, seed ^ 0x44).unwrap();
        let marked_count = rng.gen_range(1..=2usize);
        let marked: Vec<usize> = (0..marked_count).map(|i| n - 1 - i).collect();
        let net = ElectricNetwork::from_graph(&g, 0, marked, WalkToken::new(0, 0)).unwrap();
        let direct = net.effective_resistance().unwrap();
        let (_, qp) = qp_min_energy_flow(&net).unwrap();
        worst = worst.max((direct - qp).abs());
        assert!((direct - qp).abs() < 1e-9, "seed {seed}: {direct} vs {qp}");
    }
    outcome(4, worst < 1e-9, &format!("40 networks <= 12 nodes, worst gap {worst:.2e}"));
}

fn random_mst_instance(seed: u64) -> PortedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(8..=64usize);
    let cap = n * (n - 1) / 2;
    // Mostly sparse instances with a dense one in every five.
    let m = if seed.is_multiple_of(5) {
        cap / 2
    } else {
        rng.gen_range(n - 1..=(3 * n).min(cap))
    };
    gen_random_connected(n, m.max(n - 1), true, seed ^ 0xc0ffee).unwrap()
}

#[test]
fn criterion_5_mst_and_bfs_correctness() {
    let mut mst_ok = 0;
    for run in 0..100u64 {
        let g = random_mst_instance(run);
        let options = AlgoOptions {
            seed: run,
            delta: 0.01,
            fidelity: Some(Fidelity::Exact),
            ..AlgoOptions::default()
        };
        match mst(&g, &options) {
            Ok((out, _, _)) if out.edges == kruskal_mst(&g) => mst_ok += 1,
            _ => {}
        }
    }
    let mut bfs_ok = 0;
    for run in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + run);
        let n = rng.gen_range(8..=64usize);
        let cap = n * (n - 1) / 2;
        let m = rng.gen_range(n - 1..=(4 * n).min(cap));
        let g = gen_random_connected(n, m, false, run ^ 0xbf5).unwrap();
        let root = rng.gen_range(0..n);
        let options = AlgoOptions { seed: run, delta: 0.01, ..AlgoOptions::default() };
        if let Ok((out, _, _, _)) = bfs(&g, root, &options) {
            let dist = bfs_distances(&g, root);
            if (0..n).all(|v| out.layers[v] == dist[v]) {
                bfs_ok += 1;
            }
        }
    }
    outcome(
        5,
        mst_ok >= 99 && bfs_ok >= 99,
        &format!("mst {mst_ok}/100 match Kruskal, bfs {bfs_ok}/100 match distances (threshold 99)"),
    );
}

#[test]
fn criterion_6_scaling_slopes() {
    let grid = [16usize, 32, 64, 128, 256, 512, 1024];
    let bfs_summary = bfs_sweep(&grid, 2, 42).unwrap();
    let mst_summary = mst_sweep(&grid, 2, 42).unwrap();
    println!(
        "criterion 6 data: bfs slope {:.4} (ci +-{:.4}) vs sqrt(mn); mst slope {:.4} (ci +-{:.4}) vs n",
        bfs_summary.slope, bfs_summary.slope_ci, mst_summary.slope, mst_summary.slope_ci
    );
    assert!(
        bfs_summary.slope <= 1.3,
        "bfs log-log slope {} exceeds 1.3",
        bfs_summary.slope
    );
    // The MST half of this criterion is not attainable under the pinned
    // charge model: every fragment generation must run at least one
    // detection walk of T = ceil(80 sqrt(1/2 + 9 R W)) steps with
    // R = 1 + log2(n_i), W = 2 n_i^2 and a constant trial count, which
    // alone fits a log-log slope of about 1.29 over n in [16, 1024], and
    // isolating the minimum-weight edge forces Theta(log) such walks per
    // fragment whenever the restricted incident count exceeds the cluster
    // size. Measured slopes land near 1.47; shifting the classical/quantum
    // dispatch threshold in either direction only increases the fit. The
    // assert below keeps the criterion as stated.
    outcome(
        6,
        mst_summary.slope <= 1.3,
        &format!(
            "bfs slope {:.4} <= 1.3; mst slope {:.4} (required <= 1.3)",
            bfs_summary.slope, mst_summary.slope
        ),
    );
}

#[test]
fn criterion_7_grover_star() {
    let constants = RunConstants::default();
    let n = 256usize;
    let alpha = 0.05f64;
    let g = gen_star(n).unwrap();
    let marked_leaf_port = 137usize;
    let trials = 1000u32;
    let mut successes = 0u32;
    let mut success_messages = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut ledger = qroute_core::MessageLedger::new(4);
    for _ in 0..trials {
        let pred = |p: usize| p == marked_leaf_port;
        let task = GroverTask {
            owner: 0,
            domain: (0..g.degree(0)).collect(),
            marked: &pred,
            epsilon: 1.0 / (n - 1) as f64,
            alpha,
            check_messages: constants.check_messages,
            check_rounds: constants.check_rounds,
        };
        let out = distributed_grover(&task, &constants, &mut rng, &mut ledger, "g").unwrap();
        if out.found == Some(marked_leaf_port) {
            successes += 1;
            success_messages += out.messages;
        }
        assert!(out.found.is_none() || out.found == Some(marked_leaf_port));
    }
    let rate = successes as f64 / trials as f64;
    let sigma3 = 3.0 * (alpha * (1.0 - alpha) / trials as f64).sqrt();
    let mean_messages = success_messages as f64 / successes.max(1) as f64;
    let c = mean_messages / ((n as f64).sqrt() * (1.0 / alpha).ln());
    let c_max = 60.0;
    outcome(
        7,
        rate >= 1.0 - alpha - sigma3 && c <= c_max,
        &format!(
            "success rate {rate:.3} (need >= {:.3}); mean messages per success {mean_messages:.1}, recorded c = {c:.2} (cap {c_max})",
            1.0 - alpha - sigma3
        ),
    );
}

#[test]
fn criterion_8_lower_bound_quantities_and_reduction() {
    let conn = connectivity_relation_params(5).unwrap();
    assert_eq!(conn.m_lower, 625, "m = n^4 by the counting convention");
    assert_eq!(conn.m_prime, 1);
    assert_eq!(conn.l_max, 25, "per-query bound n^2");
    assert!(conn.diagnostics["l_enumerated_max"] <= 25.0);
    assert!((conn.bound - 5.0).abs() < 1e-12, "bound sqrt(625/25) = 5");
    let bfs_params = bfs_relation_params(6, 3).unwrap();
    assert!(bfs_params.l_max <= 27, "enumerated l_max {} <= d^3", bfs_params.l_max);
    // Reduction harness: replayed query count equals the ledger total on
    // every transcribed run.
    let mut checked = Vec::new();
    for seed in 0..3u64 {
        let g = gen_random_connected(24, 60, true, 900 + seed).unwrap();
        let options = AlgoOptions {
            seed,
            transcript_cap: Some(usize::MAX),
            ..AlgoOptions::default()
        };
        let (_, ledger, _) = mst(&g, &options).unwrap();
        let replayed = replay_transcript(&g, ledger.transcript().unwrap()).unwrap();
        assert_eq!(replayed, ledger.totals().total(), "mst replay seed {seed}");
        checked.push(replayed);
        let gb = gen_random_connected(24, 60, false, 1900 + seed).unwrap();
        let (_, _, bfs_ledger, _) = bfs(&gb, 0, &options).unwrap();
        let replayed = replay_transcript(&gb, bfs_ledger.transcript().unwrap()).unwrap();
        assert_eq!(replayed, bfs_ledger.totals().total(), "bfs replay seed {seed}");
        checked.push(replayed);
    }
    outcome(
        8,
        true,
        &format!(
            "connectivity(5): m=625 l<=25 bound=5; bfs(6,3): l_max={} <= 27; {} replays matched ledgers",
            bfs_params.l_max,
            checked.len()
        ),
    );
}

#[test]
fn criterion_9_findany_network_parameter_audit() {
    let mut audited = 0usize;
    let mut worst_w_ratio: f64 = 0.0;
    let mut worst_r_gap: f64 = f64::NEG_INFINITY;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let n = rng.gen_range(12..=48usize);
        let m = rng.gen_range(n - 1..=2 * n);
        let g = gen_random_connected(n, m, true, seed ^ 0xaad).unwrap();
        let options = AlgoOptions {
            seed,
            collect_audits: true,
            fidelity: Some(Fidelity::Exact),
            ..AlgoOptions::default()
        };
        let (_, _, audits) = mst(&g, &options).unwrap();
        for audit in audits {
            audited += 1;
            let n_i = audit.cluster_size as f64;
            let w_bound = 2.0 * n_i * n_i;
            let r_bound = 1.0 + n_i.log2().max(0.0);
            worst_w_ratio = worst_w_ratio.max(audit.total_weight / w_bound);
            assert!(
                audit.total_weight <= w_bound + 1e-9,
                "seed {seed}: weight {} > {w_bound}",
                audit.total_weight
            );
            if let Some(reff) = audit.effective_resistance {
                worst_r_gap = worst_r_gap.max(reff - r_bound);
                assert!(reff <= r_bound + 1e-9, "seed {seed}: R_eff {reff} > {r_bound}");
            }
        }
    }
    outcome(
        9,
        audited > 0,
        &format!(
            "{audited} walk networks audited: max weight/bound {worst_w_ratio:.3}, max R_eff - bound {worst_r_gap:.3}"
        ),
    );
}

#[test]
fn criterion_10_cover_audit() {
    let constants = RunConstants::default();
    let sparsity_cap = 8.0;
    let mut worst_sparsity: f64 = 0.0;
    let mut worst_depth: f64 = 0.0;
    let cases: Vec<(PortedGraph, &str)> = vec![
        (gen_random_connected(32, 80, false, 1).unwrap(), "random32"),
        (gen_random_connected(48, 96, false, 2).unwrap(), "random48"),
        (qroute_core::graph::generate::gen_complete(16).unwrap(), "complete16"),
        (qroute_core::graph::generate::gen_path(40).unwrap(), "path40"),
    ];
    for (g, name) in &cases {
        let n = g.node_count();
        let kappa = (n as f64).log2().ceil() as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut ledger = qroute_core::MessageLedger::new(8);
        let cover = sparse_cover(
            g,
            kappa,
            1,
            constants.walk_delta(0.01),
            &constants,
            &mut rng,
            &mut ledger,
        )
        .unwrap();
        let audit = cover.audit(g);
        assert!(audit.neighborhood_ok, "{name}: neighborhood property");
        assert!(audit.depth_constant <= 2.0 + 1e-9, "{name}: depth {}", audit.max_depth);
        assert!(
            audit.sparsity_constant <= sparsity_cap,
            "{name}: membership constant {}",
            audit.sparsity_constant
        );
        worst_sparsity = worst_sparsity.max(audit.sparsity_constant);
        worst_depth = worst_depth.max(audit.depth_constant);
    }
    outcome(
        10,
        true,
        &format!(
            "{} covers audited: depth constant <= {worst_depth:.2} (cap 2), sparsity constant <= {worst_sparsity:.2} (cap {sparsity_cap})",
            cases.len()
        ),
    );
}
