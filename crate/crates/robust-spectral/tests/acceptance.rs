//! Acceptance gate: the nine checks this artifact must pass, one test per
//! criterion, each ending in a single `criterion N …: PASS` line (visible
//! with `cargo test --test acceptance -- --nocapture`).
//!
//! Criteria 1–6, 8 and 9 run everywhere. Criterion 7 needs the usps/mnist
//! corpora on disk and is `#[ignore]`d; criterion 8's timing ratio is
//! recorded as a warning, not a hard failure, since wall-clock ratios vary
//! across machines.

use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_spectral::eigen::{bottom_nonzero_eigenpairs_with, generalized_top_eigenpairs_with};
use robust_spectral::{
    acc, add_bridge_noise, build_knn_graph, build_knn_graph_points, connected_components,
    hungarian_max_assignment, laplacian, make_blobs, robust_spectral_clustering,
    robustness_report, select_robust, spectral_clustering, spectral_embed, ExperimentConfig,
    LaplacianMatrix, Metric, NeighborGraph, PointSet, RobustParams, SolverOptions, SolverPath,
};

/// A small labeled blob dataset with parameters drawn from `rng`, sized so
/// that every pipeline stage is guaranteed feasible.
fn random_blobs(rng: &mut ChaCha8Rng, max_n: usize) -> PointSet {
    let k = rng.random_range(2..=4usize);
    let n_per = rng.random_range(8..=(max_n / k).min(25));
    let d = rng.random_range(2..=5usize);
    let spread = rng.random_range(0.1..0.5);
    make_blobs(n_per, k, d, spread, 0, rng.random()).expect("valid blob parameters")
}

// ---------------------------------------------------------------------------
// 1. Per-node scores against the materialized-indicator brute force.
// ---------------------------------------------------------------------------

/// Independent recomputation of the per-node score: literally materialize
/// the indicator difference `e_i − e_j` as an N-vector, push it through the
/// N×m eigensubspace matrix, and average the squared norms over the node's
/// input-graph neighbors.
fn bruteforce_scores(g: &NeighborGraph, vk: &Array2<f64>) -> Vec<f64> {
    let (n, m) = (g.n(), vk.ncols());
    (0..n)
        .map(|i| {
            let neighbors = g.neighbors(i);
            let mut total = 0.0;
            for &(j, _) in neighbors {
                let mut indicator = vec![0.0; n];
                indicator[i] = 1.0;
                indicator[j] = -1.0;
                for c in 0..m {
                    let proj: f64 = (0..n).map(|r| vk[[r, c]] * indicator[r]).sum();
                    total += proj * proj;
                }
            }
            total / neighbors.len() as f64
        })
        .collect()
}

#[test]
fn c1_spade_scores_match_the_bruteforce_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE01);
    let mut max_dev = 0.0f64;
    for _ in 0..50 {
        let ps = random_blobs(&mut rng, 100);
        let k_nn = rng.random_range(4..=8usize);
        let k_clusters = rng.random_range(2..=3usize);
        let m_eigs = rng.random_range(1..=3usize);
        let seed = rng.random();
        let report = robustness_report(&ps, k_nn, k_clusters, m_eigs, seed).unwrap();
        let g_input = build_knn_graph(&ps, k_nn, Metric::Euclidean).unwrap();
        let expected = bruteforce_scores(&g_input, &report.vk);
        for (i, (a, b)) in report.scores.iter().zip(&expected).enumerate() {
            let dev = (a - b).abs();
            assert!(dev <= 1e-10, "node {i}: {a} vs oracle {b} (n = {})", ps.n());
            max_dev = max_dev.max(dev);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 30.0, "budget exceeded: {secs:.1}s");
    println!(
        "criterion 1 (score oracle): PASS — 50 datasets, max |Δ| = {max_dev:.2e}, {secs:.1}s"
    );
}

// ---------------------------------------------------------------------------
// 2. Eigensolver paths against dense oracles.
// ---------------------------------------------------------------------------

fn structured_graphs() -> Vec<(String, NeighborGraph)> {
    let path50 = NeighborGraph::from_edges(
        50,
        &(0..49).map(|i| (i, i + 1, 1.0)).collect::<Vec<_>>(),
    )
    .unwrap();
    let mut ring_edges: Vec<(usize, usize, f64)> = (0..59).map(|i| (i, i + 1, 1.0)).collect();
    ring_edges.push((59, 0, 1.0));
    let cycle60 = NeighborGraph::from_edges(60, &ring_edges).unwrap();
    let star30 = NeighborGraph::from_edges(
        30,
        &(1..30).map(|i| (0, i, 1.0)).collect::<Vec<_>>(),
    )
    .unwrap();
    let mut grid_edges = Vec::new();
    for r in 0..10 {
        for c in 0..10 {
            let i = r * 10 + c;
            if c + 1 < 10 {
                grid_edges.push((i, i + 1, 1.0));
            }
            if r + 1 < 10 {
                grid_edges.push((i, i + 10, 1.0));
            }
        }
    }
    let grid100 = NeighborGraph::from_edges(100, &grid_edges).unwrap();
    let mut clique_edges = Vec::new();
    for a in 0..8 {
        for b in (a + 1)..8 {
            clique_edges.push((a, b, 1.0));
            clique_edges.push((a + 8, b + 8, 1.0));
        }
    }
    clique_edges.push((7, 8, 1.0));
    let cliques16 = NeighborGraph::from_edges(16, &clique_edges).unwrap();
    vec![
        ("path-50".into(), path50),
        ("cycle-60".into(), cycle60),
        ("star-30".into(), star30),
        ("grid-10x10".into(), grid100),
        ("bridged-cliques-16".into(), cliques16),
    ]
}

/// Eigenvalues of the materialized `pinv(L_out) · L_in`, top `m` descending,
/// computed with nalgebra only (pseudoinverse through a full symmetric
/// decomposition, then a nonsymmetric eigensolve of the product).
fn pinv_product_eigenvalues(l_in: &LaplacianMatrix, l_out: &LaplacianMatrix, m: usize) -> Vec<f64> {
    let a_in = l_in.to_dense();
    let a_out = l_out.to_dense();
    let n = a_out.nrows();
    let eig = a_out.symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v));
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..n {
        let lam = eig.eigenvalues[j];
        let inv = if lam > 1e-8 * lam_max { 1.0 / lam } else { 0.0 };
        for i in 0..n {
            scaled[(i, j)] *= inv;
        }
    }
    let pinv = &scaled * eig.eigenvectors.transpose();
    let product = pinv * a_in;
    let spectrum = product.complex_eigenvalues();
    let mut real: Vec<f64> = spectrum
        .iter()
        .map(|z| {
            assert!(
                z.im.abs() <= 1e-7 * (1.0 + z.re.abs()),
                "pinv-product eigenvalue {z} is not real"
            );
            z.re
        })
        .collect();
    real.sort_by(|a, b| b.total_cmp(a));
    real.truncate(m);
    real
}

/// A k-NN graph over uniform random points, unioned with a ring so it is
/// connected by construction.
fn connected_random_graph(rng: &mut ChaCha8Rng, n_lo: usize, n_hi: usize) -> NeighborGraph {
    let n = rng.random_range(n_lo..=n_hi);
    let k_nn = rng.random_range(3..=6usize);
    let pts = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
    let base = build_knn_graph_points(pts.view(), k_nn, Metric::Euclidean).unwrap();
    let mut edges = std::collections::BTreeMap::new();
    for i in 0..n {
        for &(j, w) in base.neighbors(i) {
            if i < j {
                edges.insert((i, j), w);
            }
        }
    }
    for i in 0..n {
        let ring = if i + 1 < n { (i, i + 1) } else { (0, n - 1) };
        edges.entry(ring).or_insert(1.0);
    }
    let edges: Vec<(usize, usize, f64)> = edges.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    let g = NeighborGraph::from_edges(n, &edges).unwrap();
    assert_eq!(connected_components(&g).iter().max(), Some(&0));
    g
}

#[test]
fn c2_eigensolver_paths_match_dense_oracles() {
    use robust_spectral::dense_eig_oracle;

    // Bottom-spectrum agreement: structured graphs plus random k-NN graphs,
    // all with n ≤ 200, iterative vs. the dense oracle to 1e-8.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE02);
    let mut graphs = structured_graphs();
    for i in 0..9 {
        let ps = random_blobs(&mut rng, 200);
        let k_nn = rng.random_range(4..=8usize);
        let g = build_knn_graph(&ps, k_nn, Metric::Euclidean).unwrap();
        graphs.push((format!("knn-{i}-n{}", g.n()), g));
    }
    let mut max_dev_bottom = 0.0f64;
    for (name, g) in &graphs {
        assert!(g.n() <= 200, "{name}");
        let l = laplacian(g);
        let components = 1 + *connected_components(g).iter().max().unwrap();
        let m = 4.min(g.n() - components);
        let ndarray_l = {
            let dm = l.to_dense();
            Array2::from_shape_fn((g.n(), g.n()), |(i, j)| dm[(i, j)])
        };
        let oracle = dense_eig_oracle(&ndarray_l).unwrap();
        let nonzero: Vec<f64> = {
            let lam_max = oracle.values().last().copied().unwrap_or(1.0);
            oracle
                .values()
                .iter()
                .copied()
                .filter(|&v| v > 1e-8 * lam_max)
                .take(m)
                .collect()
        };
        let iterative = bottom_nonzero_eigenpairs_with(
            &l,
            m,
            1e-8,
            &SolverOptions {
                path: SolverPath::Iterative,
                ..SolverOptions::default()
            },
        )
        .unwrap();
        for (j, (a, b)) in iterative.values().iter().zip(&nonzero).enumerate() {
            let dev = (a - b).abs();
            assert!(dev <= 1e-8, "{name} pair {j}: iterative {a} vs oracle {b}");
            max_dev_bottom = max_dev_bottom.max(dev);
        }
    }

    // Generalized agreement: 20 random connected pairs (n = 30–100), both
    // library paths vs. the materialized pinv-product, 1e-6 relative.
    let mut max_rel_gen = 0.0f64;
    for _ in 0..20 {
        let g_out = connected_random_graph(&mut rng, 30, 100);
        let n = g_out.n();
        let mut in_pairs = std::collections::BTreeSet::new();
        for i in 0..n {
            in_pairs.insert((i.min((i + 1) % n), i.max((i + 1) % n)));
            if i % 3 == 0 {
                let j = (i + rng.random_range(2..n - 1)) % n;
                in_pairs.insert((i.min(j), i.max(j)));
            }
        }
        let in_edges: Vec<(usize, usize, f64)> =
            in_pairs.into_iter().map(|(a, b)| (a, b, 1.0)).collect();
        let g_in = NeighborGraph::from_edges(n, &in_edges).unwrap();
        let (l_in, l_out) = (laplacian(&g_in), laplacian(&g_out));
        let m = 3;
        let oracle = pinv_product_eigenvalues(&l_in, &l_out, m);
        for path in [SolverPath::Dense, SolverPath::Iterative] {
            let pairs = generalized_top_eigenpairs_with(
                &l_in,
                &l_out,
                m,
                1e-8,
                &SolverOptions {
                    path,
                    ..SolverOptions::default()
                },
            )
            .unwrap();
            for (j, (a, b)) in pairs.values().iter().zip(&oracle).enumerate() {
                let rel = (a - b).abs() / b.abs().max(1e-12);
                assert!(rel <= 1e-6, "n={n} pair {j}: {path:?} {a} vs pinv-product {b}");
                max_rel_gen = max_rel_gen.max(rel);
            }
        }
    }
    println!(
        "criterion 2 (eigen oracles): PASS — bottom max |Δ| = {max_dev_bottom:.2e} over {} graphs, generalized max rel = {max_rel_gen:.2e} over 20 pairs",
        graphs.len()
    );
}

// ---------------------------------------------------------------------------
// 3. Generalized identity cases.
// ---------------------------------------------------------------------------

#[test]
fn c3_generalized_identity_and_scaling_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE03);
    let mut worst = 0.0f64;
    for trial in 0..4 {
        let g = connected_random_graph(&mut rng, 30, 80);
        let l = laplacian(&g);
        let m = 5.min(g.n() - 1);
        for path in [SolverPath::Dense, SolverPath::Iterative] {
            let options = SolverOptions {
                path,
                ..SolverOptions::default()
            };
            let identity = generalized_top_eigenpairs_with(&l, &l, m, 1e-8, &options).unwrap();
            for &v in identity.values() {
                assert!((v - 1.0).abs() <= 1e-8, "trial {trial} {path:?}: {v} != 1");
                worst = worst.max((v - 1.0).abs());
            }
            for c in [0.5, 2.0, 10.0] {
                let scaled = generalized_top_eigenpairs_with(
                    &l.scaled(c).unwrap(),
                    &l,
                    m,
                    1e-8,
                    &options,
                )
                .unwrap();
                for &v in scaled.values() {
                    assert!((v - c).abs() <= 1e-8, "trial {trial} {path:?}: {v} != {c}");
                    worst = worst.max((v - c).abs());
                }
            }
        }
    }
    println!("criterion 3 (identity cases): PASS — max deviation {worst:.2e} across c ∈ {{1, 0.5, 2, 10}}");
}

// ---------------------------------------------------------------------------
// 4. Assignment optimality and accuracy invariances.
// ---------------------------------------------------------------------------

fn for_each_permutation(k: usize, mut visit: impl FnMut(&[usize])) {
    fn heap(perm: &mut Vec<usize>, size: usize, visit: &mut impl FnMut(&[usize])) {
        if size == 1 {
            visit(perm);
            return;
        }
        for i in 0..size {
            heap(perm, size - 1, visit);
            if size % 2 == 0 {
                perm.swap(i, size - 1);
            } else {
                perm.swap(0, size - 1);
            }
        }
    }
    let mut perm: Vec<usize> = (0..k).collect();
    heap(&mut perm, k, &mut visit);
}

#[test]
fn c4_assignment_matches_exhaustive_search_and_acc_invariances_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE04);
    for trial in 0..200 {
        let k = rng.random_range(1..=7usize);
        let cost = Array2::from_shape_fn((k, k), |_| rng.random_range(0..20) as f64);
        let perm = hungarian_max_assignment(&cost).unwrap();
        let total: f64 = (0..k).map(|i| cost[[i, perm[i]]]).sum();
        let mut best = f64::NEG_INFINITY;
        for_each_permutation(k, |p| {
            best = best.max((0..k).map(|i| cost[[i, p[i]]]).sum());
        });
        assert_eq!(total, best, "trial {trial}: {total} vs exhaustive {best}");
    }

    for trial in 0..30 {
        let n = rng.random_range(5..=50usize);
        let k = rng.random_range(2..=5usize);
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let base = acc(&pred, &truth).unwrap();
        assert_eq!(base, acc(&truth, &pred).unwrap(), "trial {trial}: symmetry");
        let mut sigma: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            sigma.swap(i, rng.random_range(0..=i));
        }
        let relabeled_pred: Vec<usize> = pred.iter().map(|&c| sigma[c]).collect();
        let relabeled_truth: Vec<usize> = truth.iter().map(|&c| sigma[c]).collect();
        assert_eq!(base, acc(&relabeled_pred, &truth).unwrap(), "trial {trial}: pred relabel");
        assert_eq!(base, acc(&pred, &relabeled_truth).unwrap(), "trial {trial}: truth relabel");
    }
    println!("criterion 4 (accuracy metric): PASS — 200 exhaustive matches, 30 exact invariance trials");
}

// ---------------------------------------------------------------------------
// 5. Degenerate pipeline: keeping every node reproduces the plain labels.
// ---------------------------------------------------------------------------

#[test]
fn c5_full_subset_degenerates_to_plain_clustering() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE05);
    for trial in 0..10 {
        let ps = random_blobs(&mut rng, 100);
        let k_nn = rng.random_range(5..=8usize);
        let k_clusters = ps.n_classes().unwrap();
        let seed = rng.random();
        let plain = spectral_clustering(&ps, k_clusters, k_nn, seed).unwrap();
        let robust = robust_spectral_clustering(
            &ps,
            &RobustParams {
                k_nn,
                k_clusters,
                m_nodes: ps.n(),
                m_eigs: 2,
                seed,
            },
        )
        .unwrap();
        let agreement = acc(&robust.full_labels, &plain.labels).unwrap();
        assert_eq!(agreement, 1.0, "trial {trial}: m_nodes = N must reproduce plain labels");
    }
    println!("criterion 5 (degenerate pipeline): PASS — 10/10 datasets at ACC = 1.0");
}

// ---------------------------------------------------------------------------
// 6. Noise-robustness regression at desk scale.
// ---------------------------------------------------------------------------

#[test]
fn c6_robust_pipeline_beats_plain_under_bridge_noise() {
    let start = Instant::now();
    let mut plain_mean = 0.0;
    let mut robust_mean = 0.0;
    for seed in 1..=5u64 {
        let clean = make_blobs(200, 3, 2, 0.08, 0, seed).unwrap();
        let (noisy, _) = add_bridge_noise(&clean, 0.10, seed).unwrap();
        let truth = noisy.labels().unwrap();
        let plain = spectral_clustering(&noisy, 3, 10, seed).unwrap();
        let robust = robust_spectral_clustering(
            &noisy,
            &RobustParams {
                k_nn: 10,
                k_clusters: 3,
                m_nodes: noisy.n() / 3,
                m_eigs: 3,
                seed,
            },
        )
        .unwrap();
        plain_mean += acc(&plain.labels, truth).unwrap() / 5.0;
        robust_mean += acc(&robust.full_labels, truth).unwrap() / 5.0;
    }

    assert!(
        robust_mean > plain_mean,
        "robust mean {robust_mean:.4} must exceed plain mean {plain_mean:.4}"
    );
    assert!(
        robust_mean >= plain_mean - 0.02,
        "hard floor violated: {robust_mean:.4} vs {plain_mean:.4}"
    );

    // Regression targets recorded on the first verified run; the seeded flow
    // is deterministic, so drift beyond libm noise means behavior changed.
    let fixture = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/noise_regression.txt"
    ))
    .expect("fixture file must exist");
    let lookup = |key: &str| -> f64 {
        fixture
            .lines()
            .find_map(|l| l.trim().strip_prefix(key)?.trim().strip_prefix('=')?.trim().parse().ok())
            .unwrap_or_else(|| panic!("fixture missing '{key}'"))
    };
    let (fixed_plain, fixed_robust) = (lookup("plain_mean"), lookup("robust_mean"));
    assert!(
        (plain_mean - fixed_plain).abs() < 1e-9,
        "plain mean drifted: {plain_mean:.12} vs recorded {fixed_plain:.12}"
    );
    assert!(
        (robust_mean - fixed_robust).abs() < 1e-9,
        "robust mean drifted: {robust_mean:.12} vs recorded {fixed_robust:.12}"
    );

    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 120.0, "budget exceeded: {secs:.1}s");
    println!(
        "criterion 6 (noise regression): PASS — plain {:.2}% vs robust {:.2}% over 5 seeds, {secs:.1}s",
        100.0 * plain_mean,
        100.0 * robust_mean
    );
}

// ---------------------------------------------------------------------------
// 7. Replication presets against their recorded reference accuracies.
// ---------------------------------------------------------------------------

#[test]
#[ignore = "needs the usps/mnist corpora on disk; point ROBUST_SPECTRAL_DATA at them"]
fn c7_replication_presets_hit_reference_accuracies() {
    let data = std::env::var("ROBUST_SPECTRAL_DATA").unwrap_or_else(|_| "data".into());
    let usps = ExperimentConfig::parse_str(&format!(
        "dataset.kind = csv-labeled\ndataset.path = {data}/usps.csv\n\
         k_clusters = 10\nk_nn = 10\nm_nodes = 2000\nseed = 0\n"
    ))
    .unwrap();
    let report = robust_spectral::run_experiment(&usps).unwrap();
    let (base, robust) = (
        100.0 * report.acc_baseline.expect("usps is labeled"),
        100.0 * report.acc_robust.expect("usps is labeled"),
    );
    assert!((base - 64.31).abs() <= 3.0, "usps baseline {base:.2}% vs 64.31 ± 3");
    assert!((robust - 78.87).abs() <= 5.0, "usps robust {robust:.2}% vs 78.87 ± 5");
    println!(
        "usps: baseline {base:.2}% robust {robust:.2}% (eig speedup {:.1}x)",
        report.speedup
    );

    let mnist = ExperimentConfig::parse_str(&format!(
        "dataset.kind = idx\ndataset.path = {data}/t10k-images-idx3-ubyte\n\
         k_clusters = 10\nk_nn = 10\nm_nodes = 1500\nseed = 0\n"
    ))
    .unwrap();
    let report = robust_spectral::run_experiment(&mnist).unwrap();
    let robust = 100.0 * report.acc_robust.expect("mnist labels sit next to the images");
    assert!((robust - 70.40).abs() <= 5.0, "mnist robust {robust:.2}% vs 70.40 ± 5");
    println!(
        "criterion 7 (replication): PASS — mnist robust {robust:.2}% (eig speedup {:.1}x)",
        report.speedup
    );
}

// ---------------------------------------------------------------------------
// 8. Eigendecomposition shrink pays off (desk-scale proxy, warning-level).
// ---------------------------------------------------------------------------

#[test]
fn c8_subset_eigensolve_is_faster_desk_proxy() {
    let solve_secs = |n_per: usize, seed: u64| -> f64 {
        let ps = make_blobs(n_per, 5, 10, 0.3, 0, seed).unwrap();
        let g = build_knn_graph(&ps, 10, Metric::Euclidean).unwrap();
        let l = laplacian(&g);
        let options = SolverOptions {
            path: SolverPath::Dense,
            ..SolverOptions::default()
        };
        let (pairs, secs) = robust_spectral::timed(|| {
            bottom_nonzero_eigenpairs_with(&l, 10, 1e-8, &options)
        });
        pairs.unwrap();
        secs
    };
    let full = solve_secs(400, 21); // n = 2000
    let subset = solve_secs(100, 21); // n = 500
    let ratio = full / subset;
    // Wall-clock ratios are machine-dependent, so a shortfall is recorded
    // as a warning rather than failing the gate.
    if ratio >= 8.0 {
        println!(
            "criterion 8 (eig speedup proxy): PASS — dense n=2000 {full:.2}s vs n=500 {subset:.3}s, {ratio:.1}x ≥ 8x"
        );
    } else {
        println!(
            "criterion 8 (eig speedup proxy): WARN — ratio {ratio:.1}x below 8x (warning-level, not a failure)"
        );
    }
}

// ---------------------------------------------------------------------------
// 9. Determinism of every pipeline entry point.
// ---------------------------------------------------------------------------

#[test]
fn c9_every_entry_point_is_deterministic_under_a_fixed_seed() {
    let seed = 5u64;
    let clean = make_blobs(40, 3, 2, 0.08, 0, seed).unwrap();
    let (noisy, displaced) = add_bridge_noise(&clean, 0.10, seed).unwrap();
    {
        let (again, displaced2) = add_bridge_noise(&clean, 0.10, seed).unwrap();
        assert_eq!(noisy.points(), again.points());
        assert_eq!(displaced, displaced2);
    }

    let g = build_knn_graph(&noisy, 8, Metric::Euclidean).unwrap();
    let embed = || spectral_embed(&g, 3).unwrap();
    assert_eq!(embed().coords, embed().coords);

    let cluster = || spectral_clustering(&noisy, 3, 8, seed).unwrap();
    assert_eq!(cluster().labels, cluster().labels);

    let score = || robustness_report(&noisy, 8, 3, 3, seed).unwrap();
    let (r1, r2) = (score(), score());
    assert_eq!(r1.scores, r2.scores);
    assert_eq!(r1.ranking, r2.ranking);
    assert_eq!(r1.eigenvalues, r2.eigenvalues);
    assert_eq!(select_robust(&r1, 40).unwrap(), select_robust(&r2, 40).unwrap());

    let params = RobustParams {
        k_nn: 8,
        k_clusters: 3,
        m_nodes: 40,
        m_eigs: 3,
        seed,
    };
    let pipeline = || robust_spectral_clustering(&noisy, &params).unwrap();
    let (p1, p2) = (pipeline(), pipeline());
    assert_eq!(p1.full_labels, p2.full_labels);
    assert_eq!(p1.robust_ids, p2.robust_ids);
    assert_eq!(p1.centroids, p2.centroids);

    // The iterative solver path seeds its own starting block, so it must be
    // reproducible too (Auto would pick dense at this size).
    let big = make_blobs(150, 2, 3, 0.3, 0, seed).unwrap();
    let lb = laplacian(&build_knn_graph(&big, 6, Metric::Euclidean).unwrap());
    let iter_once = || {
        bottom_nonzero_eigenpairs_with(
            &lb,
            3,
            1e-8,
            &SolverOptions {
                path: SolverPath::Iterative,
                seed,
                ..SolverOptions::default()
            },
        )
        .unwrap()
    };
    let (e1, e2) = (iter_once(), iter_once());
    assert_eq!(e1.values(), e2.values());
    assert_eq!(e1.vectors(), e2.vectors());

    println!("criterion 9 (determinism): PASS — labels, scores, rankings, and eigenpairs identical across reruns");
}
