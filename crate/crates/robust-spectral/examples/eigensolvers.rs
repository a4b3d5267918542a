//! Compare the dense and the iterative path for the bottom nonzero
//! Laplacian eigenpairs — the step the robust pipeline shrinks.
//!
//! ```text
//! cargo run --release --example eigensolvers
//! ```

use robust_spectral::{
    build_knn_graph, laplacian, make_blobs, timed, Metric, Result, SolverOptions, SolverPath,
};
use robust_spectral::eigen::bottom_nonzero_eigenpairs_with;

fn main() -> Result<()> {
    let ps = make_blobs(300, 5, 10, 0.3, 0, 11)?;
    let g = build_knn_graph(&ps, 10, Metric::Euclidean)?;
    let l = laplacian(&g);
    println!("Laplacian of a {}-node graph, extracting 5 bottom nonzero pairs", g.n());

    let mut solved = Vec::new();
    for path in [SolverPath::Dense, SolverPath::Iterative] {
        let options = SolverOptions {
            path,
            seed: 11,
            ..SolverOptions::default()
        };
        let (pairs, secs) = timed(|| bottom_nonzero_eigenpairs_with(&l, 5, 1e-8, &options));
        let pairs = pairs?;
        println!("{path:?}: {secs:.4}s, eigenvalues {:?}", rounded(pairs.values()));
        solved.push(pairs);
    }

    // Both paths land on the same spectrum (the eigenvectors may differ by
    // sign or by rotation inside repeated eigenvalues).
    let max_gap = solved[0]
        .values()
        .iter()
        .zip(solved[1].values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    println!("largest eigenvalue disagreement between paths: {max_gap:.2e}");
    Ok(())
}

fn rounded(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| (v * 1e4).round() / 1e4).collect()
}
