//! Dense solver paths: full symmetric eigendecompositions, used below the
//! size threshold and as the reference the iterative paths are checked
//! against.

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;

use super::{canonicalize_signs, EigenPairs};

/// Full spectrum of a symmetric dense matrix, ascending, eigenvectors as the
/// columns of an `Array2`.
pub(super) fn symmetric_eigen_ascending(m: DMatrix<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = eig.eigenvectors[(row, src)];
        }
    }
    (values, vectors)
}

/// Bottom `m` eigenpairs above the zero cutoff, by full decomposition.
pub(super) fn bottom_nonzero(
    l: &LaplacianMatrix,
    m: usize,
    zero_tol: f64,
    n_components: usize,
) -> Result<EigenPairs> {
    let (values, vectors) = symmetric_eigen_ascending(l.to_dense());
    let lambda_max = values.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = zero_tol * lambda_max;
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > cutoff).collect();
    if keep.len() < m {
        return Err(Error::Rank {
            requested: m,
            available: keep.len(),
            components: n_components,
        });
    }
    let n = l.n();
    let mut out_values = Vec::with_capacity(m);
    let mut out_vectors = Array2::zeros((n, m));
    for (col, &src) in keep.iter().take(m).enumerate() {
        out_values.push(values[src]);
        out_vectors.column_mut(col).assign(&vectors.column(src));
    }
    canonicalize_signs(&mut out_vectors);
    Ok(EigenPairs::new(out_values, out_vectors))
}

/// Top `m` generalized eigenpairs by the explicit symmetrized construction:
/// decompose `L_out`, keep the eigenvectors `U` above the pseudoinverse
/// cutoff with values `μ`, form the rank-restricted symmetric matrix
/// `T = diag(μ^{-1/2}) Uᵀ L_in U diag(μ^{-1/2})` (the operator
/// `pinv^{1/2}·L_in·pinv^{1/2}` expressed in the basis of its own range), and
/// map its eigenvectors `y` back as `v = U diag(μ^{-1/2}) y`.
pub(super) fn generalized_top(
    l_in: &LaplacianMatrix,
    l_out: &LaplacianMatrix,
    m: usize,
    zero_tol: f64,
) -> Result<EigenPairs> {
    let n = l_out.n();
    let (mu, u) = symmetric_eigen_ascending(l_out.to_dense());
    let mu_max = mu.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = zero_tol * mu_max;
    let keep: Vec<usize> = (0..n).filter(|&i| mu[i] > cutoff).collect();
    let rank = keep.len();
    if rank < m {
        return Err(Error::Rank {
            requested: m,
            available: rank,
            components: n - rank,
        });
    }

    // Weighted basis W = U_pos · diag(μ^{-1/2}), one column per kept pair.
    let mut w = Array2::zeros((n, rank));
    for (col, &src) in keep.iter().enumerate() {
        let scale = 1.0 / mu[src].sqrt();
        for row in 0..n {
            w[[row, col]] = u[[row, src]] * scale;
        }
    }

    // T = Wᵀ L_in W, assembled column by column through the sparse matvec.
    let mut t = DMatrix::zeros(rank, rank);
    let mut lw = vec![0.0; n];
    let mut wcol = vec![0.0; n];
    for j in 0..rank {
        for row in 0..n {
            wcol[row] = w[[row, j]];
        }
        l_in.matvec(&wcol, &mut lw);
        for i in 0..rank {
            let dot: f64 = (0..n).map(|row| w[[row, i]] * lw[row]).sum();
            t[(i, j)] = dot;
        }
    }
    let t = (&t + t.transpose()) * 0.5;

    let (theta, y) = symmetric_eigen_ascending(t);
    let theta_scale = theta
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()))
        .max(1e-300);
    let mut out_values = Vec::with_capacity(m);
    let mut out_vectors = Array2::zeros((n, m));
    for col in 0..m {
        let src = rank - 1 - col; // descending
        let th = theta[src];
        if th < -1e-8 * theta_scale {
            return Err(Error::Numerical(format!(
                "generalized eigenvalue {th} is negative beyond tolerance"
            )));
        }
        out_values.push(th.max(0.0));
        // v = W y, then unit-normalize.
        let mut v = vec![0.0; n];
        for row in 0..n {
            let mut acc = 0.0;
            for k in 0..rank {
                acc += w[[row, k]] * y[[k, src]];
            }
            v[row] = acc;
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Numerical(
                "generalized eigenvector collapsed to zero after back-mapping".to_string(),
            ));
        }
        for (row, val) in v.iter().enumerate() {
            out_vectors[[row, col]] = val / norm;
        }
    }
    canonicalize_signs(&mut out_vectors);
    Ok(EigenPairs::new(out_values, out_vectors))
}

#[cfg(test)]
mod tests {
    use crate::dataset::make_blobs;
    use crate::eigen::{generalized_top_eigenpairs, SolverOptions, SolverPath};
    use crate::graph::{build_knn_graph, connected_components, laplacian, Metric};

    /// The dense generalized path must agree with a literal pseudoinverse
    /// product: eigenvalues of pinv(L_out)·L_in computed with an
    /// independent SVD-based pseudoinverse and a nonsymmetric eigensolver.
    #[test]
    fn generalized_matches_nonsymmetric_pseudoinverse_product() {
        for seed in [3u64, 4, 5] {
            let ps = make_blobs(10, 3, 2, 0.35, 0, seed).unwrap();
            let g_in = build_knn_graph(&ps, 4, Metric::Euclidean).unwrap();
            let g_out = build_knn_graph(&ps, 7, Metric::Euclidean).unwrap();
            if connected_components(&g_out).iter().max() != Some(&0) {
                continue; // want a connected output graph for this fixture
            }
            let l_in = laplacian(&g_in);
            let l_out = laplacian(&g_out);
            let m = 4;
            let pairs = generalized_top_eigenpairs(&l_in, &l_out, m, 1e-8).unwrap();

            let pinv = l_out
                .to_dense()
                .svd(true, true)
                .pseudo_inverse(1e-10)
                .expect("svd pseudoinverse");
            let product = pinv * l_in.to_dense();
            let mut eigs: Vec<f64> = product
                .complex_eigenvalues()
                .iter()
                .map(|c| {
                    assert!(c.im.abs() < 1e-7, "unexpected complex eigenvalue {c}");
                    c.re
                })
                .collect();
            eigs.sort_by(|a, b| b.total_cmp(a));
            for (got, want) in pairs.values().iter().zip(eigs.iter()) {
                assert!(
                    (got - want).abs() <= 1e-6 * want.abs().max(1.0),
                    "seed {seed}: {got} vs oracle {want}"
                );
            }
        }
    }

    /// Returned vectors must actually satisfy pinv(L_out)·L_in·v = λ·v.
    #[test]
    fn generalized_vectors_satisfy_operator_equation() {
        let ps = make_blobs(12, 2, 3, 0.4, 0, 8).unwrap();
        let g_in = build_knn_graph(&ps, 3, Metric::Euclidean).unwrap();
        let g_out = build_knn_graph(&ps, 5, Metric::Euclidean).unwrap();
        let l_in = laplacian(&g_in);
        let l_out = laplacian(&g_out);
        let opts = SolverOptions {
            path: SolverPath::Dense,
            ..SolverOptions::default()
        };
        let pairs =
            crate::eigen::generalized_top_eigenpairs_with(&l_in, &l_out, 3, 1e-8, &opts).unwrap();
        let pinv = l_out
            .to_dense()
            .svd(true, true)
            .pseudo_inverse(1e-10)
            .unwrap();
        let product = pinv * l_in.to_dense();
        for j in 0..pairs.len() {
            let v = nalgebra::DVector::from_iterator(l_in.n(), pairs.vector(j).iter().copied());
            let lhs = &product * &v;
            let rhs = v * pairs.values()[j];
            assert!((lhs - rhs).norm() < 1e-6, "operator residual too large");
        }
    }
}
