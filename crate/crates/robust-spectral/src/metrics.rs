//! Clustering accuracy: the fraction of points whose predicted cluster maps
//! onto their true label under the best one-to-one cluster↔label matching.
//!
//! The matching is the classic assignment problem, solved exactly with the
//! O(k³) Hungarian algorithm on the (negated) confusion matrix.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Counts of (predicted cluster, true label) co-occurrences.
#[derive(Debug, Clone)]
pub struct ConfusionMatrix {
    /// `counts[[p, t]]` = number of points predicted `p` with true label `t`.
    counts: Array2<u64>,
    /// Total number of points; equals the sum of all counts.
    n: usize,
}

impl ConfusionMatrix {
    /// Tally two equal-length label vectors. Labels are densified by first
    /// occurrence, so arbitrary (even sparse) ids are fine.
    pub fn from_labels(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::Parameter(format!(
                "label vectors differ in length: {} vs {}",
                pred.len(),
                truth.len()
            )));
        }
        if pred.is_empty() {
            return Err(Error::Parameter("label vectors are empty".to_string()));
        }
        let pred_dense = densify(pred);
        let truth_dense = densify(truth);
        let k_pred = pred_dense.iter().max().unwrap() + 1;
        let k_true = truth_dense.iter().max().unwrap() + 1;
        let mut counts = Array2::zeros((k_pred, k_true));
        for (&p, &t) in pred_dense.iter().zip(truth_dense.iter()) {
            counts[[p, t]] += 1;
        }
        Ok(Self {
            counts,
            n: pred.len(),
        })
    }

    pub fn counts(&self) -> &Array2<u64> {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The counts zero-padded to a square matrix, so a one-to-one matching
    /// always exists even when the two sides use different numbers of labels.
    pub fn padded_square(&self) -> Array2<u64> {
        let k = self.counts.nrows().max(self.counts.ncols());
        let mut square = Array2::zeros((k, k));
        square
            .slice_mut(ndarray::s![..self.counts.nrows(), ..self.counts.ncols()])
            .assign(&self.counts);
        square
    }
}

fn densify(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|&l| match seen.iter().position(|&s| s == l) {
            Some(idx) => idx,
            None => {
                seen.push(l);
                seen.len() - 1
            }
        })
        .collect()
}

/// Exact maximum-weight perfect matching on a square matrix. Returns the
/// permutation `perm` with `perm[row] = column` maximizing the selected sum.
///
/// Internally runs the potentials form of the Hungarian algorithm on the
/// negated matrix (minimization), which is O(k³).
pub fn hungarian_max_assignment(cost: &Array2<f64>) -> Result<Vec<usize>> {
    let k = cost.nrows();
    if cost.ncols() != k {
        return Err(Error::Parameter(format!(
            "assignment matrix must be square, got {}x{}",
            k,
            cost.ncols()
        )));
    }
    if k == 0 {
        return Err(Error::Parameter("assignment matrix is empty".to_string()));
    }
    if cost.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter(
            "assignment matrix has non-finite entries".to_string(),
        ));
    }

    // Minimize -cost with 1-based potentials; p[j] = row matched to column j.
    let a = |i: usize, j: usize| -cost[[i - 1, j - 1]];
    let mut u = vec![0.0f64; k + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = a(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // Augment along the recorded alternating path.
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; k];
    for j in 1..=k {
        perm[p[j] - 1] = j - 1;
    }
    Ok(perm)
}

/// Clustering accuracy: best-matching agreement fraction between a predicted
/// clustering and ground-truth labels. Symmetric in its arguments and
/// invariant to relabeling either side.
pub fn acc(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let confusion = ConfusionMatrix::from_labels(pred, truth)?;
    let square = confusion.padded_square().mapv(|c| c as f64);
    let perm = hungarian_max_assignment(&square)?;
    let matched: f64 = perm.iter().enumerate().map(|(i, &j)| square[[i, j]]).sum();
    Ok(matched / confusion.n() as f64)
}
