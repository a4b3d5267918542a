//! Symmetric k-nearest-neighbor graphs and their unnormalized Laplacians.
//!
//! Neighbor search is brute force over all pairs, which is exact and fast
//! enough for the ten-thousand-point scale this crate targets. Edges carry
//! binary weight 1 and the graph is the union symmetrization of the directed
//! k-NN lists: (i, j) is an edge iff j is among i's k nearest or vice versa.

use std::io::Write;

use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::dataset::PointSet;
use crate::error::{Error, Result};

/// Distance used for neighbor ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    Cosine,
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::Parameter(format!("unknown metric '{other}'"))),
        }
    }
}

/// Undirected weighted graph over `n` nodes, plus the directed k-NN lists it
/// was symmetrized from (empty for hand-built graphs).
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    n: usize,
    /// Unique undirected edges with `i < j` and positive weight, sorted.
    edges: Vec<(usize, usize, f64)>,
    /// Symmetrized adjacency: per node, `(neighbor, weight)` sorted by neighbor.
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Directed pre-symmetrization lists, ordered nearest first.
    knn_lists: Vec<Vec<usize>>,
}

impl NeighborGraph {
    /// Build a graph from an explicit undirected edge list. Pairs are
    /// normalized to `i < j`; duplicates, self-loops and non-positive weights
    /// are rejected. The k-NN lists are left empty.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut normalized: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for &(a, b, w) in edges {
            if a == b {
                return Err(Error::Parameter(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Parameter(format!(
                    "edge ({a},{b}) out of range for {n} nodes"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Parameter(format!(
                    "edge ({a},{b}) has non-positive weight {w}"
                )));
            }
            normalized.push((a.min(b), a.max(b), w));
        }
        normalized.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        if let Some(w) = normalized.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Parameter(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let adjacency = adjacency_from_edges(n, &normalized);
        Ok(Self {
            n,
            edges: normalized,
            adjacency,
            knn_lists: vec![Vec::new(); n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Symmetrized neighbors of `i`, sorted by node id.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, w)| w).sum()
    }

    /// Directed k-NN list of `i` (nearest first), pre-symmetrization.
    pub fn knn_list(&self, i: usize) -> &[usize] {
        &self.knn_lists[i]
    }

    /// Write the edge list as `i j w` lines sorted by `(i, j)`.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> Result<()> {
        for &(i, j, w) in &self.edges {
            writeln!(out, "{i} {j} {w}")?;
        }
        Ok(())
    }
}

fn adjacency_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<(usize, f64)>> {
    let mut adjacency = vec![Vec::new(); n];
    for &(i, j, w) in edges {
        adjacency[i].push((j, w));
        adjacency[j].push((i, w));
    }
    for list in &mut adjacency {
        list.sort_by_key(|&(j, _)| j);
    }
    adjacency
}

fn squared_euclidean(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn cosine_distance(a: ndarray::ArrayView1<f64>, na: f64, b: ndarray::ArrayView1<f64>, nb: f64) -> f64 {
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
    1.0 - dot / (na * nb)
}

/// Build the symmetric k-NN graph of a point set. Ties at equal distance are
/// broken toward the lower node index, making the build deterministic.
pub fn build_knn_graph(ps: &PointSet, k: usize, metric: Metric) -> Result<NeighborGraph> {
    build_knn_graph_points(ps.points().view(), k, metric)
}

/// As [`build_knn_graph`], over a raw row matrix (used for embedded spaces).
pub fn build_knn_graph_points(
    points: ArrayView2<f64>,
    k: usize,
    metric: Metric,
) -> Result<NeighborGraph> {
    let n = points.nrows();
    if k == 0 {
        return Err(Error::Parameter("k must be positive".to_string()));
    }
    if k >= n {
        return Err(Error::Parameter(format!(
            "k = {k} must be smaller than the number of points n = {n}"
        )));
    }
    if let Some(bad) = points.iter().position(|v| !v.is_finite()) {
        return Err(Error::Parameter(format!(
            "non-finite coordinate at flat index {bad}"
        )));
    }

    let norms: Vec<f64> = match metric {
        Metric::Cosine => (0..n)
            .map(|i| points.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect(),
        Metric::Euclidean => Vec::new(),
    };

    let knn_lists: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = match metric {
                    Metric::Euclidean => squared_euclidean(points.row(i), points.row(j)),
                    Metric::Cosine => cosine_distance(points.row(i), norms[i], points.row(j), norms[j]),
                };
                dists.push((d, j));
            }
            dists.select_nth_unstable_by(k - 1, |a, b| {
                a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
            });
            dists.truncate(k);
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            dists.into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    // Union symmetrization with binary weights.
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (i, list) in knn_lists.iter().enumerate() {
        for &j in list {
            edges.push((i.min(j), i.max(j), 1.0));
        }
    }
    edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    edges.dedup_by_key(|e| (e.0, e.1));

    let adjacency = adjacency_from_edges(n, &edges);
    Ok(NeighborGraph {
        n,
        edges,
        adjacency,
        knn_lists,
    })
}

/// Connected component id per node; ids are dense `0..c` ordered by each
/// component's smallest member.
pub fn connected_components(g: &NeighborGraph) -> Vec<usize> {
    components_from_neighbors(g.n, |i| g.adjacency[i].iter().map(|&(j, _)| j))
}

pub(crate) fn components_from_neighbors<'a, I, F>(n: usize, neighbors: F) -> Vec<usize>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize> + 'a,
{
    let mut ids = vec![usize::MAX; n];
    let mut next = 0usize;
    let mut stack = Vec::new();
    for start in 0..n {
        if ids[start] != usize::MAX {
            continue;
        }
        ids[start] = next;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for v in neighbors(u) {
                if ids[v] == usize::MAX {
                    ids[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    ids
}

/// Sparse symmetric unnormalized Laplacian `L = D - W` in CSR form.
#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `y = L x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[idx] * x[self.col_idx[idx]];
            }
            y[i] = acc;
        }
    }

    /// `x^T L x`, evaluated through the sparse entries.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[idx] == j {
                return self.values[idx];
            }
        }
        0.0
    }

    /// Diagonal (weighted degrees).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.entry(i, i)).collect()
    }

    /// The same Laplacian with every entry multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<LaplacianMatrix> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Parameter(format!("scale must be positive, got {c}")));
        }
        Ok(LaplacianMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }

    /// Gershgorin upper bound on the largest eigenvalue.
    pub fn max_eigenvalue_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|idx| self.values[idx].abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Component ids derived from the off-diagonal sparsity pattern.
    pub fn component_ids(&self) -> Vec<usize> {
        components_from_neighbors(self.n, |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .filter(move |&idx| self.col_idx[idx] != i && self.values[idx] != 0.0)
                .map(|idx| self.col_idx[idx])
        })
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[idx])] = self.values[idx];
            }
        }
        m
    }
}

/// Assemble the unnormalized Laplacian of a graph.
pub fn laplacian(g: &NeighborGraph) -> LaplacianMatrix {
    let n = g.n;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let degree = g.degree(i);
        let mut placed_diag = false;
        for &(j, w) in g.neighbors(i) {
            if !placed_diag && j > i {
                col_idx.push(i);
                values.push(degree);
                placed_diag = true;
            }
            col_idx.push(j);
            values.push(-w);
        }
        if !placed_diag {
            col_idx.push(i);
            values.push(degree);
        }
        row_ptr.push(col_idx.len());
    }
    LaplacianMatrix {
        n,
        row_ptr,
        col_idx,
        values,
    }
}
