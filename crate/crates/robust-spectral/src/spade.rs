//! Per-node robustness scoring.
//!
//! The idea: treat the input k-NN graph and the k-NN graph rebuilt on top of
//! the spectral embedding as two metric structures over the same nodes, and
//! measure how much the map between them distorts each node's neighborhood.
//! The top generalized eigenpairs of `pinv(L_output)·L_input` give the
//! directions of largest distortion; stacking them scaled by √eigenvalue
//! yields the matrix `V_k`, and a node's score is the average squared
//! `V_k`-row difference to its input-graph neighbors. Large score = the
//! node's local geometry survives the embedding badly, i.e. its edges behave
//! like noise/adversarial wiring; small score = robust node.

use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;

use crate::clustering::spectral_embed_with;
use crate::dataset::PointSet;
use crate::eigen::{generalized_top_eigenpairs_with, timed, EigenPairs, SolverOptions};
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, build_knn_graph_points, laplacian, Metric, NeighborGraph};

/// Everything the robustness analysis produces for one dataset.
#[derive(Debug, Clone)]
pub struct SpadeReport {
    /// Per-node score, ≥ 0; larger = less robust.
    pub scores: Vec<f64>,
    /// N×m eigensubspace matrix: column j is the j-th generalized
    /// eigenvector scaled by √eigenvalue.
    pub vk: Array2<f64>,
    /// The m generalized eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Node ids sorted by ascending score, ties kept in id order.
    pub ranking: Vec<usize>,
}

/// Wall-clock seconds of the stages inside one robustness analysis.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpadeStageTimes {
    pub graph_input: f64,
    pub embed: f64,
    pub graph_output: f64,
    pub generalized_eig: f64,
    pub scoring: f64,
}

/// Scale each eigenvector by the square root of its eigenvalue: column j of
/// the result is `vectors[:,j]·√values[j]`.
pub fn build_vk(pairs: &EigenPairs) -> Result<Array2<f64>> {
    let scale = pairs
        .values()
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()))
        .max(1e-300);
    let mut vk = Array2::zeros((pairs.n(), pairs.len()));
    for (j, &lambda) in pairs.values().iter().enumerate() {
        if lambda < -1e-8 * scale {
            return Err(Error::Numerical(format!(
                "eigenvalue {lambda} is negative; cannot take its square root"
            )));
        }
        let s = lambda.max(0.0).sqrt();
        for i in 0..pairs.n() {
            vk[[i, j]] = pairs.vectors()[[i, j]] * s;
        }
    }
    Ok(vk)
}

/// Average squared `vk`-row difference between each node and its symmetrized
/// input-graph neighbors. Equivalently, with edge indicators e_{i,j} = e_i −
/// e_j, this is (1/|N(i)|)·Σ_j ‖V_kᵀ e_{i,j}‖².
pub fn spade_scores(g_input: &NeighborGraph, vk: &Array2<f64>) -> Result<Vec<f64>> {
    let n = g_input.n();
    if vk.nrows() != n {
        return Err(Error::Parameter(format!(
            "vk has {} rows but the graph has {n} nodes",
            vk.nrows()
        )));
    }
    if let Some(i) = (0..n).find(|&i| g_input.neighbors(i).is_empty()) {
        return Err(Error::Contract(format!(
            "node {i} is isolated in the input graph; every node needs at least one neighbor to score"
        )));
    }
    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let neighbors = g_input.neighbors(i);
            let row_i = vk.row(i);
            let total: f64 = neighbors
                .iter()
                .map(|&(j, _)| {
                    vk.row(j)
                        .iter()
                        .zip(row_i.iter())
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                })
                .sum();
            total / neighbors.len() as f64
        })
        .collect();
    Ok(scores)
}

fn ranking_of(scores: &[f64]) -> Vec<usize> {
    let mut ranking: Vec<usize> = (0..scores.len()).collect();
    ranking.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    ranking
}

/// Full robustness analysis of a point set: input graph, spectral embedding,
/// output graph on the embedding, generalized eigenpairs, V_k, scores.
pub fn robustness_report(
    ps: &PointSet,
    k_nn: usize,
    k_clusters: usize,
    m_eigs: usize,
    seed: u64,
) -> Result<SpadeReport> {
    let options = SolverOptions {
        seed,
        ..SolverOptions::default()
    };
    robustness_report_timed(ps, k_nn, k_clusters, m_eigs, &options).map(|(r, _)| r)
}

/// As [`robustness_report`], also reporting per-stage wall-clock times.
pub fn robustness_report_timed(
    ps: &PointSet,
    k_nn: usize,
    k_clusters: usize,
    m_eigs: usize,
    options: &SolverOptions,
) -> Result<(SpadeReport, SpadeStageTimes)> {
    let (g_input, t_graph_in) = timed(|| build_knn_graph(ps, k_nn, Metric::Euclidean));
    let g_input = g_input?;
    let (embedding, t_embed) =
        timed(|| spectral_embed_with(&g_input, k_clusters, options));
    let coords = embedding?.coords;
    let (g_output, t_graph_out) =
        timed(|| build_knn_graph_points(coords.view(), k_nn, Metric::Euclidean));
    let g_output = g_output?;
    let l_input = laplacian(&g_input);
    let l_output = laplacian(&g_output);
    let (pairs, t_eig) =
        timed(|| generalized_top_eigenpairs_with(&l_input, &l_output, m_eigs, 1e-8, options));
    let pairs = pairs?;
    let (report, t_score) = timed(|| -> Result<SpadeReport> {
        let vk = build_vk(&pairs)?;
        let scores = spade_scores(&g_input, &vk)?;
        let ranking = ranking_of(&scores);
        Ok(SpadeReport {
            scores,
            vk,
            eigenvalues: pairs.values().to_vec(),
            ranking,
        })
    });
    Ok((
        report?,
        SpadeStageTimes {
            graph_input: t_graph_in,
            embed: t_embed,
            graph_output: t_graph_out,
            generalized_eig: t_eig,
            scoring: t_score,
        },
    ))
}

/// The `m_nodes` most robust node ids (lowest scores, stable ties by id),
/// returned sorted by id.
pub fn select_robust(report: &SpadeReport, m_nodes: usize) -> Result<Vec<usize>> {
    let n = report.scores.len();
    if m_nodes == 0 {
        return Err(Error::Parameter("m_nodes must be positive".to_string()));
    }
    if m_nodes > n {
        return Err(Error::Parameter(format!(
            "m_nodes = {m_nodes} exceeds the dataset size {n}"
        )));
    }
    let mut ids: Vec<usize> = report.ranking[..m_nodes].to_vec();
    ids.sort_unstable();
    Ok(ids)
}

/// Write `node_id,score,rank` rows (CSV with header) plus a sidecar text
/// file holding the descending eigenvalues, one per line.
pub fn write_score_csv(
    report: &SpadeReport,
    csv_path: &Path,
    eigenvalues_path: &Path,
) -> Result<()> {
    let n = report.scores.len();
    let mut rank_of = vec![0usize; n];
    for (rank, &node) in report.ranking.iter().enumerate() {
        rank_of[node] = rank;
    }
    let mut csv = std::io::BufWriter::new(std::fs::File::create(csv_path)?);
    writeln!(csv, "node_id,score,rank")?;
    for (i, &score) in report.scores.iter().enumerate() {
        writeln!(csv, "{i},{score},{}", rank_of[i])?;
    }
    csv.into_inner().map_err(|e| e.into_error())?.sync_all()?;

    let mut sidecar = std::io::BufWriter::new(std::fs::File::create(eigenvalues_path)?);
    for v in &report.eigenvalues {
        writeln!(sidecar, "{v}")?;
    }
    sidecar.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    Ok(())
}
