//! Unnormalized spectral clustering: embed nodes with the bottom nonzero
//! Laplacian eigenvectors, then run seeded k-means in the embedded space.
//!
//! The k-means here is deliberately plain Lloyd iteration with
//! k-means++-style seeding and independent restarts; randomness is fully
//! determined by the caller's seed so every pipeline run is reproducible.

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::PointSet;
use crate::eigen::{bottom_nonzero_eigenpairs_with, timed, SolverOptions};
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, laplacian, Metric, NeighborGraph};

/// Spectrally embedded points: row i is node i in the eigenvector basis.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// N×k, column j is the j-th bottom nonzero eigenvector.
    pub coords: Array2<f64>,
    /// The k eigenvalues behind the columns, ascending.
    pub source_eigenvalues: Vec<f64>,
}

/// Result of a k-means run (or of spectral clustering, which ends in one).
#[derive(Debug, Clone)]
pub struct ClusterAssignment {
    /// Cluster id in 0..k per point.
    pub labels: Vec<usize>,
    /// k×d centroid matrix. For plain [`kmeans`] this lives in the space the
    /// points were given in; [`spectral_clustering`] reports centroids in the
    /// original feature space instead (its callers assign new points there).
    pub centroids: Array2<f64>,
    /// Sum of squared distances to assigned centroids, in the space the
    /// clustering ran in.
    pub inertia: f64,
    /// Seed that produced this assignment.
    pub seed: u64,
    /// Cluster ids that ended a Lloyd iteration empty and had to be reseeded
    /// with a far point; empty when clustering went smoothly.
    pub empty_clusters: Vec<usize>,
}

/// Embed the graph's nodes with the `k` bottom nonzero Laplacian
/// eigenvectors (ascending eigenvalue order, no row normalization).
pub fn spectral_embed(g: &NeighborGraph, k: usize) -> Result<Embedding> {
    spectral_embed_with(g, k, &SolverOptions::default())
}

pub fn spectral_embed_with(g: &NeighborGraph, k: usize, options: &SolverOptions) -> Result<Embedding> {
    let l = laplacian(g);
    let pairs = bottom_nonzero_eigenpairs_with(&l, k, 1e-8, options)?;
    Ok(Embedding {
        coords: pairs.vectors().clone(),
        source_eigenvalues: pairs.values().to_vec(),
    })
}

/// Lloyd's k-means with k-means++ seeding and `n_restarts` independent
/// restarts; returns the restart with the lowest inertia (first on ties).
/// Assignment ties go to the lower cluster id, clusters that empty out are
/// reseeded with the point farthest from its current centroid.
pub fn kmeans(
    points: ArrayView2<f64>,
    k: usize,
    seed: u64,
    max_iter: usize,
    n_restarts: usize,
) -> Result<ClusterAssignment> {
    let n = points.nrows();
    if k == 0 {
        return Err(Error::Parameter("k must be positive".to_string()));
    }
    if k > n {
        return Err(Error::Parameter(format!(
            "cannot form k = {k} clusters from {n} points"
        )));
    }
    if max_iter == 0 || n_restarts == 0 {
        return Err(Error::Parameter(
            "max_iter and n_restarts must be positive".to_string(),
        ));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("points contain non-finite values".to_string()));
    }

    let mut best: Option<ClusterAssignment> = None;
    for restart in 0..n_restarts {
        let restart_seed = seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let run = lloyd_run(points, k, seed, restart_seed, max_iter)?;
        let better = match &best {
            None => true,
            Some(b) => run.inertia < b.inertia,
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn lloyd_run(
    points: ArrayView2<f64>,
    k: usize,
    reported_seed: u64,
    restart_seed: u64,
    max_iter: usize,
) -> Result<ClusterAssignment> {
    let n = points.nrows();
    let d = points.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed);

    let mut centroids = plus_plus_seeding(points, k, &mut rng);
    let mut labels = vec![usize::MAX; n];
    let mut empty_clusters: Vec<usize> = Vec::new();
    let mut last_inertia = f64::INFINITY;

    for _iter in 0..max_iter {
        // Assignment step.
        let mut changed = false;
        for i in 0..n {
            let (c, _) = nearest_centroid(points.row(i), &centroids);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        // Update step.
        let mut sums = Array2::<f64>::zeros((k, d));
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            let row = points.row(i);
            for j in 0..d {
                sums[[c, j]] += row[j];
            }
        }
        let mut reseeded = false;
        for c in 0..k {
            if counts[c] == 0 {
                // Reseed with the point farthest from its own centroid.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(points.row(a), centroids.row(labels[a]))
                            .total_cmp(&sq_dist(points.row(b), centroids.row(labels[b])))
                    })
                    .expect("n >= k >= 1");
                centroids.row_mut(c).assign(&points.row(far));
                if !empty_clusters.contains(&c) {
                    empty_clusters.push(c);
                }
                reseeded = true;
            } else {
                for j in 0..d {
                    centroids[[c, j]] = sums[[c, j]] / counts[c] as f64;
                }
            }
        }

        if cfg!(debug_assertions) && !reseeded {
            let inertia = total_inertia(points, &labels, &centroids);
            debug_assert!(
                inertia <= last_inertia * (1.0 + 1e-9) + 1e-12,
                "Lloyd iteration increased inertia: {last_inertia} -> {inertia}"
            );
            last_inertia = inertia;
        }
    }

    let inertia = total_inertia(points, &labels, &centroids);
    empty_clusters.sort_unstable();
    Ok(ClusterAssignment {
        labels,
        centroids,
        inertia,
        seed: reported_seed,
        empty_clusters,
    })
}

/// k-means++ D²-sampling: first center uniform, each next with probability
/// proportional to the squared distance to the nearest chosen center.
fn plus_plus_seeding(points: ArrayView2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = Array2::zeros((k, d));
    let mut chosen = vec![false; n];

    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&points.row(first));
    chosen[first] = true;

    let mut dist2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), centroids.row(0)))
        .collect();
    for c in 1..k {
        let total: f64 = dist2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in dist2.iter().enumerate() {
                if u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            // All mass on chosen centers (duplicate-heavy data): take the
            // lowest-index point not yet used.
            (0..n).find(|&i| !chosen[i]).unwrap_or(0)
        };
        centroids.row_mut(c).assign(&points.row(pick));
        chosen[pick] = true;
        for i in 0..n {
            dist2[i] = dist2[i].min(sq_dist(points.row(i), centroids.row(c)));
        }
    }
    centroids
}

fn nearest_centroid(point: ndarray::ArrayView1<f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (c, row) in centroids.rows().into_iter().enumerate() {
        let dd = sq_dist(point, row);
        // Strict comparison keeps ties on the lower cluster id.
        if dd.total_cmp(&best_d).is_lt() {
            best_d = dd;
            best = c;
        }
    }
    (best, best_d)
}

fn sq_dist(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn total_inertia(points: ArrayView2<f64>, labels: &[usize], centroids: &Array2<f64>) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(points.row(i), centroids.row(c)))
        .sum()
}

/// Wall-clock seconds of the stages inside one spectral clustering run.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectralStageTimes {
    /// k-NN graph construction.
    pub graph: f64,
    /// Laplacian eigensolve (the dominant cost at scale).
    pub eig: f64,
    /// k-means over the embedding.
    pub kmeans: f64,
}

/// The coordinates the clustering composites feed to k-means.
///
/// For a connected graph this is exactly the bottom-nonzero embedding,
/// saturating at the n−1 usable dimensions when `k_clusters` exhausts the
/// spectrum (so k = N stays well-defined). A disconnected graph gets the
/// classical treatment instead: its bottom eigenvectors are the component
/// indicators, so those come first (a canonical orthonormal basis of the
/// nullspace) and nonzero eigenvectors only fill the remaining columns.
/// Without the indicator columns, nothing in the embedding would separate
/// the components at all.
fn clustering_coords(
    g: &NeighborGraph,
    k_clusters: usize,
    options: &SolverOptions,
) -> Result<Array2<f64>> {
    let n = g.n();
    let components = crate::graph::connected_components(g);
    let c = components.iter().max().map_or(0, |m| m + 1);
    if c == 1 {
        let k_eff = k_clusters.min(n - 1);
        return Ok(spectral_embed_with(g, k_eff, options)?.coords);
    }
    let k_ind = k_clusters.min(c);
    let k_non = k_clusters.saturating_sub(c).min(n - c);
    let mut coords = Array2::zeros((n, k_ind + k_non));
    let mut sizes = vec![0usize; c];
    for &comp in &components {
        sizes[comp] += 1;
    }
    for (i, &comp) in components.iter().enumerate() {
        if comp < k_ind {
            coords[[i, comp]] = 1.0 / (sizes[comp] as f64).sqrt();
        }
    }
    if k_non > 0 {
        let emb = spectral_embed_with(g, k_non, options)?;
        coords
            .slice_mut(ndarray::s![.., k_ind..])
            .assign(&emb.coords);
    }
    Ok(coords)
}

/// Spectral clustering of an already-built graph; `centroids` live in the
/// embedded space. Stage times cover the eigensolve and the k-means (the
/// graph was built by the caller).
pub fn spectral_cluster_graph(
    g: &NeighborGraph,
    k_clusters: usize,
    seed: u64,
    options: &SolverOptions,
) -> Result<(ClusterAssignment, SpectralStageTimes)> {
    let (coords, eig_secs) = timed(|| clustering_coords(g, k_clusters, options));
    let coords = coords?;
    // Embedded-space k-means landscapes get bumpy when cluster sizes are
    // unbalanced (indicator-like coordinates scale as 1/√size), so spend
    // restarts generously — the embedding is tiny compared to the eigensolve.
    let (assignment, kmeans_secs) = timed(|| kmeans(coords.view(), k_clusters, seed, 100, 100));
    Ok((
        assignment?,
        SpectralStageTimes {
            graph: 0.0,
            eig: eig_secs,
            kmeans: kmeans_secs,
        },
    ))
}

/// Plain three-step spectral clustering: k-NN graph, spectral embedding into
/// `k_clusters` dimensions, k-means. Labels cover all points; `centroids` are
/// reported in the *original* feature space (recomputed as per-cluster means
/// of `ps`), while `inertia` refers to the embedded space the k-means ran in.
pub fn spectral_clustering(
    ps: &PointSet,
    k_clusters: usize,
    k_nn: usize,
    seed: u64,
) -> Result<ClusterAssignment> {
    spectral_clustering_timed(ps, k_clusters, k_nn, seed, &SolverOptions::default()).map(|(a, _)| a)
}

/// As [`spectral_clustering`], also reporting per-stage wall-clock times.
pub fn spectral_clustering_timed(
    ps: &PointSet,
    k_clusters: usize,
    k_nn: usize,
    seed: u64,
    options: &SolverOptions,
) -> Result<(ClusterAssignment, SpectralStageTimes)> {
    let (graph, graph_secs) = timed(|| build_knn_graph(ps, k_nn, Metric::Euclidean));
    let graph = graph?;
    let (mut assignment, mut times) = spectral_cluster_graph(&graph, k_clusters, seed, options)?;
    assignment.centroids =
        original_space_centroids(ps.points().view(), &assignment.labels, k_clusters);
    times.graph = graph_secs;
    Ok((assignment, times))
}

/// Per-cluster means of the original feature rows. A cluster with no members
/// gets NaN coordinates, which can never win a nearest-centroid comparison.
pub(crate) fn original_space_centroids(
    points: ArrayView2<'_, f64>,
    labels: &[usize],
    k: usize,
) -> Array2<f64> {
    let d = points.ncols();
    let mut sums = Array2::<f64>::zeros((k, d));
    let mut counts = vec![0usize; k];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        let row = points.row(i);
        for j in 0..d {
            sums[[c, j]] += row[j];
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            sums.row_mut(c).fill(f64::NAN);
        } else {
            let inv = 1.0 / counts[c] as f64;
            sums.row_mut(c).mapv_inplace(|v| v * inv);
        }
    }
    sums
}
