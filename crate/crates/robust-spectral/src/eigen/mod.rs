//! Eigensolvers for the two spectral problems the pipeline needs:
//!
//! * the *bottom nonzero* eigenpairs of a graph Laplacian (spectral
//!   embedding), and
//! * the *top generalized* eigenpairs of `pinv(L_out) · L_in` restricted to
//!   the complement of `L_out`'s nullspace (robustness scoring).
//!
//! Each problem has two interchangeable paths satisfying the same contracts:
//! a dense path (classical full eigendecomposition, default for n ≤ 1024) and
//! an iterative path that only touches the sparse matrices (preconditioned
//! block iteration for the bottom problem, a Lanczos process in the `L_out`
//! inner product for the generalized one).
//!
//! Conventions shared by every solver:
//! * eigenvector columns are unit ℓ₂-normalized;
//! * each column's sign is canonical: the entry of largest magnitude
//!   (earliest on ties) is nonnegative;
//! * "zero" eigenvalues are those ≤ `zero_tol · λ_max`, a relative spectral
//!   cutoff that also defines the pseudoinverse.

mod dense;
mod lanczos;
mod lobpcg;

use std::time::Instant;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;

/// A batch of eigenpairs; column `j` of `vectors` belongs to `values[j]`.
/// Ordering follows the producing operation (ascending for bottom spectra,
/// descending for top spectra).
#[derive(Debug, Clone)]
pub struct EigenPairs {
    values: Vec<f64>,
    vectors: Array2<f64>,
}

impl EigenPairs {
    pub fn new(values: Vec<f64>, vectors: Array2<f64>) -> Self {
        assert_eq!(values.len(), vectors.ncols(), "one column per eigenvalue");
        Self { values, vectors }
    }

    /// Number of eigenpairs.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Dimension of the underlying space.
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> ArrayView1<'_, f64> {
        self.vectors.column(j)
    }
}

/// Which solver implementation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    /// Dense below [`SolverOptions::dense_threshold`], iterative above.
    Auto,
    Dense,
    Iterative,
}

/// Knobs shared by the eigensolver entry points.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub path: SolverPath,
    /// Largest n the Auto path still solves densely.
    pub dense_threshold: usize,
    /// Seed for iterative starting blocks; fixed default keeps runs
    /// reproducible.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            path: SolverPath::Auto,
            // Dense is bulletproof and cheap up to ~1k nodes; above that the
            // iterative paths win by an order of magnitude (measured: at
            // n = 1500 the dense bottom-10 solve takes ~2.5 s against ~0.25 s
            // iterative) while meeting the same residual contracts.
            dense_threshold: 1024,
            seed: 0,
        }
    }
}

impl SolverOptions {
    fn use_dense(&self, n: usize) -> bool {
        match self.path {
            SolverPath::Dense => true,
            SolverPath::Iterative => false,
            SolverPath::Auto => n <= self.dense_threshold,
        }
    }
}

/// The `m` smallest eigenvalues of `l` strictly above the zero cutoff
/// (`zero_tol · λ_max`), ascending, with unit eigenvectors. Residuals satisfy
/// ‖Lv − λv‖₂ ≤ 1e-6·λ_max per pair.
pub fn bottom_nonzero_eigenpairs(
    l: &LaplacianMatrix,
    m: usize,
    zero_tol: f64,
) -> Result<EigenPairs> {
    bottom_nonzero_eigenpairs_with(l, m, zero_tol, &SolverOptions::default())
}

/// As [`bottom_nonzero_eigenpairs`] with an explicit path choice.
pub fn bottom_nonzero_eigenpairs_with(
    l: &LaplacianMatrix,
    m: usize,
    zero_tol: f64,
    options: &SolverOptions,
) -> Result<EigenPairs> {
    validate_counts(m, zero_tol)?;
    let components = l.component_ids();
    let n_components = count_components(&components);
    let available = l.n() - n_components;
    if m > available {
        return Err(Error::Rank {
            requested: m,
            available,
            components: n_components,
        });
    }
    let pairs = if options.use_dense(l.n()) {
        dense::bottom_nonzero(l, m, zero_tol, n_components)?
    } else {
        lobpcg::bottom_nonzero(l, m, zero_tol, &components, options.seed)?
    };
    debug_assert!(pairs.values.windows(2).all(|w| w[0] <= w[1]));
    Ok(pairs)
}

/// The `m` largest eigenvalues (descending, all ≥ 0) of the operator
/// `pinv(L_out) · L_in` restricted to the complement of `L_out`'s nullspace,
/// with the corresponding eigenvectors, unit-normalized.
///
/// The restriction is realized symmetrically: with `P = pinv(L_out)^{1/2}`,
/// the symmetric problem `P·L_in·P` is solved and eigenvectors are mapped
/// back through `P`, which guarantees a real nonnegative spectrum and keeps
/// every returned vector orthogonal to the nullspace.
pub fn generalized_top_eigenpairs(
    l_in: &LaplacianMatrix,
    l_out: &LaplacianMatrix,
    m: usize,
    zero_tol: f64,
) -> Result<EigenPairs> {
    generalized_top_eigenpairs_with(l_in, l_out, m, zero_tol, &SolverOptions::default())
}

/// As [`generalized_top_eigenpairs`] with an explicit path choice.
pub fn generalized_top_eigenpairs_with(
    l_in: &LaplacianMatrix,
    l_out: &LaplacianMatrix,
    m: usize,
    zero_tol: f64,
    options: &SolverOptions,
) -> Result<EigenPairs> {
    validate_counts(m, zero_tol)?;
    if l_in.n() != l_out.n() {
        return Err(Error::Parameter(format!(
            "Laplacian dimensions differ: {} vs {}",
            l_in.n(),
            l_out.n()
        )));
    }
    let components = l_out.component_ids();
    let n_components = count_components(&components);
    let rank = l_out.n() - n_components;
    if m > rank {
        return Err(Error::Rank {
            requested: m,
            available: rank,
            components: n_components,
        });
    }
    let pairs = if options.use_dense(l_out.n()) {
        dense::generalized_top(l_in, l_out, m, zero_tol)?
    } else {
        lanczos::generalized_top(l_in, l_out, m, &components, options.seed)?
    };
    debug_assert!(pairs.values.windows(2).all(|w| w[0] >= w[1]));
    debug_assert!(pairs.values.iter().all(|&v| v >= 0.0));
    Ok(pairs)
}

/// Full spectrum of a small symmetric matrix, ascending; the reference
/// implementation the scalable paths are tested against, and the fallback
/// for small problems.
pub fn dense_eig_oracle(m: &Array2<f64>) -> Result<EigenPairs> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Parameter(format!(
            "matrix must be square, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n == 0 || n > 2000 {
        return Err(Error::Parameter(format!(
            "dense oracle handles 1 ≤ n ≤ 2000, got n = {n}"
        )));
    }
    let scale = m.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[[i, j]] - m[[j, i]]).abs() > 1e-10 * scale {
                return Err(Error::Parameter(format!(
                    "matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {}",
                    (m[[i, j]] - m[[j, i]]).abs()
                )));
            }
        }
    }
    let mut dm = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            dm[(i, j)] = 0.5 * (m[[i, j]] + m[[j, i]]);
        }
    }
    let (values, vectors) = dense::symmetric_eigen_ascending(dm);
    let mut pairs = EigenPairs::new(values, vectors);
    canonicalize_signs(&mut pairs.vectors);
    Ok(pairs)
}

/// Run `op` and report its result together with monotonic wall-clock seconds.
pub fn timed<T>(op: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let result = op();
    (result, start.elapsed().as_secs_f64())
}

fn validate_counts(m: usize, zero_tol: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Parameter("m must be positive".to_string()));
    }
    if !(zero_tol > 0.0) || !zero_tol.is_finite() {
        return Err(Error::Parameter(format!(
            "zero_tol must be a positive real, got {zero_tol}"
        )));
    }
    Ok(())
}

fn count_components(ids: &[usize]) -> usize {
    ids.iter().copied().max().map_or(0, |m| m + 1)
}

/// Flip eigenvector columns so the entry of largest magnitude (earliest on
/// ties) is nonnegative; removes the solver-dependent sign ambiguity.
pub(crate) fn canonicalize_signs(vectors: &mut Array2<f64>) {
    for mut col in vectors.columns_mut() {
        let mut best = 0usize;
        let mut best_abs = f64::NEG_INFINITY;
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

/// ‖Lv − λv‖₂ for a candidate pair.
pub(crate) fn residual_norm(l: &LaplacianMatrix, v: &[f64], lambda: f64) -> f64 {
    let mut lv = vec![0.0; v.len()];
    l.matvec(v, &mut lv);
    lv.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Orthogonal projector onto the complement of a Laplacian nullspace, which
/// for `L = D − W` is spanned by the per-component constant vectors: the
/// projection simply subtracts each component's mean.
#[derive(Debug, Clone)]
pub(crate) struct ComponentProjector {
    members: Vec<Vec<usize>>,
}

impl ComponentProjector {
    pub fn from_ids(ids: &[usize]) -> Self {
        let count = ids.iter().copied().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); count];
        for (i, &c) in ids.iter().enumerate() {
            members[c].push(i);
        }
        Self { members }
    }

    pub fn n_components(&self) -> usize {
        self.members.len()
    }

    pub fn project(&self, x: &mut [f64]) {
        for comp in &self.members {
            let mean = comp.iter().map(|&i| x[i]).sum::<f64>() / comp.len() as f64;
            for &i in comp {
                x[i] -= mean;
            }
        }
    }
}

/// Largest-eigenvalue estimate by seeded power iteration; used to scale
/// relative tolerances in the iterative paths.
pub(crate) fn estimate_max_eigenvalue(l: &LaplacianMatrix, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let n = l.n();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut y = vec![0.0; n];
    let mut lambda = 0.0f64;
    for _ in 0..200 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        l.matvec(&x, &mut y);
        let next: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let done = (next - lambda).abs() <= 1e-8 * next.abs().max(1e-300);
        lambda = next;
        std::mem::swap(&mut x, &mut y);
        if done {
            break;
        }
    }
    if lambda <= 0.0 {
        // Edgeless graph: fall back to the (also zero) Gershgorin bound, then
        // to 1 so relative tolerances stay meaningful.
        l.max_eigenvalue_bound().max(1.0)
    } else {
        lambda
    }
}
