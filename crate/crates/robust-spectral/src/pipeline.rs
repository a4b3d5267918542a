//! Robust spectral clustering: score nodes, cluster the robust core, extend
//! to everyone else.
//!
//! The plain pipeline clusters all N points at once, so noisy nodes corrupt
//! the Laplacian eigenvectors that everything downstream depends on. The
//! robust pipeline instead (1) scores every node, (2) keeps the `m_nodes`
//! most robust ones, (3) runs spectral clustering on a fresh k-NN graph over
//! just that subset, and (4) assigns every remaining point to the nearest
//! cluster centroid in the original coordinate space. Steps 3–4 also run the
//! expensive eigensolve on an m×m Laplacian instead of N×N, which is where
//! the wall-clock savings come from.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use crate::clustering::{original_space_centroids, spectral_cluster_graph, ClusterAssignment};
use crate::dataset::PointSet;
use crate::eigen::{timed, SolverOptions};
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph_points, Metric};
use crate::spade::{robustness_report_timed, select_robust, SpadeReport};

/// Wall-clock seconds per pipeline stage, keyed by stage name.
///
/// Stages: `graph_input`, `embed_full_or_subset`, `spade`, `subset_graph`, `subset_eig`,
/// `kmeans`, `assign`. A `BTreeMap` keeps the report order stable.
pub type StageTimings = BTreeMap<&'static str, f64>;

/// Tuning knobs for [`robust_spectral_clustering`].
#[derive(Debug, Clone)]
pub struct RobustParams {
    /// Neighbors per node for both the full and the subset k-NN graphs.
    pub k_nn: usize,
    /// Number of clusters.
    pub k_clusters: usize,
    /// Size of the robust subset that gets clustered directly.
    pub m_nodes: usize,
    /// Number of generalized eigenpairs behind the robustness scores.
    pub m_eigs: usize,
    /// RNG seed for eigensolver starts and k-means.
    pub seed: u64,
}

/// Output of the robust pipeline.
#[derive(Debug, Clone)]
pub struct RobustClusteringResult {
    /// Cluster label for every point, robust subset and rest alike.
    pub full_labels: Vec<usize>,
    /// Ids of the robust subset, sorted ascending.
    pub robust_ids: Vec<usize>,
    /// The subset clustering (labels indexed subset-locally).
    pub robust_assignment: ClusterAssignment,
    /// Per-cluster centroids in the original coordinate space.
    pub centroids: Array2<f64>,
    /// Wall-clock seconds per stage.
    pub timings: StageTimings,
    /// The robustness analysis the subset selection came from.
    pub report: SpadeReport,
}

/// Assign each point to the centroid with the smallest Euclidean distance;
/// ties go to the lower cluster index. Centroid rows that contain NaN (a
/// convention for empty clusters) never win.
pub fn centroid_assign(points: ArrayView2<'_, f64>, centroids: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
    if centroids.nrows() == 0 {
        return Err(Error::Parameter("need at least one centroid".to_string()));
    }
    if points.ncols() != centroids.ncols() {
        return Err(Error::Parameter(format!(
            "points have dimension {} but centroids have dimension {}",
            points.ncols(),
            centroids.ncols()
        )));
    }
    let labels = points
        .rows()
        .into_iter()
        .map(|p| {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, row) in centroids.rows().into_iter().enumerate() {
                let d: f64 = row
                    .iter()
                    .zip(p.iter())
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                if d.total_cmp(&best_d).is_lt() {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect();
    Ok(labels)
}

/// Robust spectral clustering with default solver options (see module docs
/// for the stages).
pub fn robust_spectral_clustering(
    ps: &PointSet,
    params: &RobustParams,
) -> Result<RobustClusteringResult> {
    robust_spectral_clustering_with(ps, params, &SolverOptions::default())
}

/// As [`robust_spectral_clustering`], with explicit solver options. The
/// `seed` inside `options` is overridden by `params.seed`.
pub fn robust_spectral_clustering_with(
    ps: &PointSet,
    params: &RobustParams,
    options: &SolverOptions,
) -> Result<RobustClusteringResult> {
    let n = ps.n();
    if params.m_nodes > n {
        return Err(Error::Parameter(format!(
            "m_nodes = {} exceeds the dataset size {n}",
            params.m_nodes
        )));
    }
    if params.k_clusters > params.m_nodes {
        return Err(Error::Parameter(format!(
            "k_clusters = {} exceeds m_nodes = {}; the subset cannot host that many clusters",
            params.k_clusters, params.m_nodes
        )));
    }
    let options = SolverOptions {
        seed: params.seed,
        ..*options
    };

    // Stage 1+2: robustness analysis (input graph, embedding, output graph,
    // generalized eigenpairs, scores).
    let (report, spade_times) = robustness_report_timed(
        ps,
        params.k_nn,
        params.k_clusters,
        params.m_eigs,
        &options,
    )?;
    let robust_ids = select_robust(&report, params.m_nodes)?;

    // Stage 3: fresh k-NN graph over the robust subset only, then spectral
    // clustering of that graph.
    let subset_points = {
        let mut sub = Array2::zeros((robust_ids.len(), ps.dim()));
        for (local, &global) in robust_ids.iter().enumerate() {
            sub.row_mut(local).assign(&ps.points().row(global));
        }
        sub
    };
    let (subset_graph, t_subset_graph) = timed(|| {
        build_knn_graph_points(subset_points.view(), params.k_nn, Metric::Euclidean)
    });
    let subset_graph = subset_graph?;
    let (subset_result, t_cluster) = timed(|| {
        spectral_cluster_graph(&subset_graph, params.k_clusters, params.seed, &options)
    });
    let (robust_assignment, subset_times) = subset_result?;

    // Stage 4: centroids of the robust clusters in the original coordinate
    // space. Subset members keep their subset labels; everyone else goes to
    // the nearest centroid.
    let (assign_out, t_assign) = timed(|| -> Result<(Array2<f64>, Vec<usize>)> {
        let centroids = original_space_centroids(
            subset_points.view(),
            &robust_assignment.labels,
            params.k_clusters,
        );
        let mut full_labels = centroid_assign(ps.points().view(), centroids.view())?;
        for (local, &global) in robust_ids.iter().enumerate() {
            full_labels[global] = robust_assignment.labels[local];
        }
        Ok((centroids, full_labels))
    });
    let (centroids, full_labels) = assign_out?;
    let _ = t_cluster; // broken down into subset_times below

    let mut timings = StageTimings::new();
    timings.insert("graph_input", spade_times.graph_input);
    timings.insert("embed_full_or_subset", spade_times.embed);
    timings.insert(
        "spade",
        spade_times.graph_output + spade_times.generalized_eig + spade_times.scoring,
    );
    timings.insert("subset_graph", t_subset_graph);
    timings.insert("subset_eig", subset_times.eig);
    timings.insert("kmeans", subset_times.kmeans);
    timings.insert("assign", t_assign);

    Ok(RobustClusteringResult {
        full_labels,
        robust_ids,
        robust_assignment,
        centroids,
        timings,
        report,
    })
}
