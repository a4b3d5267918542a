//! Smallest end-to-end run: generate Gaussian blobs, cluster them
//! spectrally, and measure accuracy against the generator's labels.
//!
//! ```text
//! cargo run --example blobs_quickstart
//! ```

use robust_spectral::{acc, make_blobs, spectral_clustering, Result};

fn main() -> Result<()> {
    // 3 classes x 100 points in the plane, tight enough to be separable.
    let ps = make_blobs(100, 3, 2, 0.08, 0, 42)?;
    let assignment = spectral_clustering(&ps, 3, 10, 42)?;

    let truth = ps.labels().expect("make_blobs always labels its output");
    let accuracy = acc(&assignment.labels, truth)?;
    println!("dataset {}: n = {}, d = {}", ps.name(), ps.n(), ps.dim());
    println!("clustering accuracy vs. generator labels: {:.2}%", 100.0 * accuracy);

    // The assignment also carries the k-means state behind the labels.
    println!(
        "k-means inertia {:.4}, {} empty clusters",
        assignment.inertia,
        assignment.empty_clusters.len()
    );
    Ok(())
}
