//! Iterative bottom-eigenpair path: locally optimal block preconditioned
//! conjugate-gradient (LOBPCG-style) iteration.
//!
//! The Laplacian nullspace is known exactly (per-component constants), so it
//! is handled as a hard constraint: every block is projected onto the
//! complement before orthonormalization, which makes the smallest Ritz values
//! converge directly to the bottom *nonzero* eigenvalues. The subspace each
//! sweep is span[X, M⁻¹R, X_prev] with a Jacobi (degree) preconditioner M.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;

use super::{
    canonicalize_signs, estimate_max_eigenvalue, residual_norm, ComponentProjector, EigenPairs,
};

const MAX_SWEEPS: usize = 1000;
const DROP_TOL: f64 = 1e-8;

pub(super) fn bottom_nonzero(
    l: &LaplacianMatrix,
    m: usize,
    zero_tol: f64,
    component_ids: &[usize],
    seed: u64,
) -> Result<EigenPairs> {
    use rand::{Rng, SeedableRng};
    let n = l.n();
    let projector = ComponentProjector::from_ids(component_ids);
    let available = n - projector.n_components();
    let block = (m + 4).min(available);

    let lambda_max = estimate_max_eigenvalue(l, seed);
    let target_tol = 1e-9 * lambda_max;
    let contract_tol = 1e-6 * lambda_max;

    // Jacobi preconditioner: inverse degrees, guarding degree-zero nodes
    // (singleton components, already removed by the projector).
    let diag = l.diagonal();
    let inv_diag: Vec<f64> = diag
        .iter()
        .map(|&d| if d > 1e-12 { 1.0 / d } else { 1.0 })
        .collect();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x10b9));
    let mut random_column = |projector: &ComponentProjector| -> Vec<f64> {
        let mut col: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        projector.project(&mut col);
        col
    };

    // Starting block: random, constrained, orthonormal.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut guard = 0;
    while basis.len() < block {
        let col = random_column(&projector);
        push_orthonormalized(&mut basis, col);
        guard += 1;
        if guard > 20 * block {
            return Err(Error::Numerical(
                "failed to seed an independent starting block".to_string(),
            ));
        }
    }

    let mut x_prev: Vec<Vec<f64>> = Vec::new();
    let mut ritz_values: Vec<f64> = Vec::new();
    let mut ritz_vectors: Vec<Vec<f64>> = Vec::new();

    for _sweep in 0..MAX_SWEEPS {
        let (theta, x) = rayleigh_ritz(l, &basis, block);

        // Residuals of the first m Ritz pairs decide convergence.
        let mut residuals: Vec<Vec<f64>> = Vec::with_capacity(x.len());
        let mut worst = 0.0f64;
        for (j, col) in x.iter().enumerate() {
            let mut lv = vec![0.0; n];
            l.matvec(col, &mut lv);
            for i in 0..n {
                lv[i] -= theta[j] * col[i];
            }
            if j < m {
                worst = worst.max(nrm(&lv));
            }
            residuals.push(lv);
        }
        ritz_values = theta;
        ritz_vectors = x;
        if worst <= target_tol {
            break;
        }

        // Next search space: current Ritz block, preconditioned residuals,
        // and the previous block (the "conjugate" directions).
        let mut next: Vec<Vec<f64>> = Vec::new();
        for col in &ritz_vectors {
            push_orthonormalized(&mut next, col.clone());
        }
        for mut r in residuals {
            for i in 0..n {
                r[i] *= inv_diag[i];
            }
            projector.project(&mut r);
            push_orthonormalized(&mut next, r);
        }
        for col in x_prev.drain(..) {
            push_orthonormalized(&mut next, col);
        }
        x_prev = ritz_vectors.clone();
        basis = next;
    }

    // Hard residual contract; the loop may have exhausted its sweeps.
    for j in 0..m {
        let r = residual_norm(l, &ritz_vectors[j], ritz_values[j]);
        if r > contract_tol {
            return Err(Error::Numerical(format!(
                "bottom eigenpair {j} did not converge: residual {r:.3e} vs allowed {contract_tol:.3e}"
            )));
        }
    }

    // The constraint removed the structural zeros, so anything at or below
    // the cutoff means the requested count exceeds the usable spectrum.
    let cutoff = zero_tol * lambda_max;
    let usable = ritz_values.iter().take(m).filter(|&&v| v > cutoff).count();
    if usable < m {
        return Err(Error::Rank {
            requested: m,
            available: usable,
            components: projector.n_components(),
        });
    }

    let mut vectors = Array2::zeros((n, m));
    for j in 0..m {
        for i in 0..n {
            vectors[[i, j]] = ritz_vectors[j][i];
        }
    }
    canonicalize_signs(&mut vectors);
    Ok(EigenPairs::new(ritz_values[..m].to_vec(), vectors))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn nrm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalize `col` against `basis` (two modified-Gram-Schmidt passes for
/// stability) and append it unit-normalized; near-dependent columns are
/// dropped.
fn push_orthonormalized(basis: &mut Vec<Vec<f64>>, mut col: Vec<f64>) {
    let original = nrm(&col).max(1e-300);
    for _ in 0..2 {
        for b in basis.iter() {
            let c = dot(b, &col);
            for i in 0..col.len() {
                col[i] -= c * b[i];
            }
        }
    }
    let remaining = nrm(&col);
    if remaining > DROP_TOL * original && remaining > 1e-300 {
        col.iter_mut().for_each(|v| *v /= remaining);
        basis.push(col);
    }
}

/// Rayleigh–Ritz: project L onto the orthonormal `basis`, take the `want`
/// smallest Ritz pairs, and return them lifted back to R^n.
fn rayleigh_ritz(
    l: &LaplacianMatrix,
    basis: &[Vec<f64>],
    want: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = l.n();
    let s = basis.len();
    let mut a_cols: Vec<Vec<f64>> = Vec::with_capacity(s);
    for col in basis {
        let mut av = vec![0.0; n];
        l.matvec(col, &mut av);
        a_cols.push(av);
    }
    let mut t = nalgebra::DMatrix::zeros(s, s);
    for j in 0..s {
        for i in 0..=j {
            let v = dot(&basis[i], &a_cols[j]);
            t[(i, j)] = v;
            t[(j, i)] = v;
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let take = want.min(s);
    let mut theta = Vec::with_capacity(take);
    let mut x = Vec::with_capacity(take);
    for &src in order.iter().take(take) {
        theta.push(eig.eigenvalues[src]);
        let mut col = vec![0.0; n];
        for (k, bcol) in basis.iter().enumerate() {
            let w = eig.eigenvectors[(k, src)];
            if w != 0.0 {
                for i in 0..n {
                    col[i] += w * bcol[i];
                }
            }
        }
        x.push(col);
    }
    (theta, x)
}
