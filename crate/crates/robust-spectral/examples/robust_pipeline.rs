//! The headline comparison: plain spectral clustering vs. the robust
//! pipeline on a dataset with noisy wiring between the classes.
//!
//! Displacing 10% of the points onto class-centroid midpoints plants dense
//! corridors that derail plain spectral clustering — the corridor acts as a
//! low-conductance path, so cuts through it look cheap and two true classes
//! get merged. The robust pipeline clusters only the m lowest-distortion
//! nodes (which severs the corridors) and assigns everyone else to the
//! nearest centroid in the original space.
//!
//! ```text
//! cargo run --release --example robust_pipeline
//! ```

use robust_spectral::{
    acc, add_bridge_noise, make_blobs, robust_spectral_clustering, spectral_clustering,
    Result, RobustParams,
};

fn main() -> Result<()> {
    println!("{:>4}  {:>10}  {:>10}", "seed", "plain ACC", "robust ACC");
    let mut means = (0.0, 0.0);
    for seed in 1..=5 {
        let clean = make_blobs(200, 3, 2, 0.08, 0, seed)?;
        let (noisy, _) = add_bridge_noise(&clean, 0.10, seed)?;
        let truth = noisy.labels().expect("generator labels survive corruption");

        let plain = spectral_clustering(&noisy, 3, 10, seed)?;
        let params = RobustParams {
            k_nn: 10,
            k_clusters: 3,
            m_nodes: noisy.n() / 3,
            m_eigs: 3,
            seed,
        };
        let robust = robust_spectral_clustering(&noisy, &params)?;

        let plain_acc = acc(&plain.labels, truth)?;
        let robust_acc = acc(&robust.full_labels, truth)?;
        println!("{seed:>4}  {:>9.2}%  {:>9.2}%", 100.0 * plain_acc, 100.0 * robust_acc);
        means.0 += plain_acc / 5.0;
        means.1 += robust_acc / 5.0;
    }
    println!("{:>4}  {:>9.2}%  {:>9.2}%", "mean", 100.0 * means.0, 100.0 * means.1);
    Ok(())
}
