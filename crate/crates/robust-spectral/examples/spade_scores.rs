//! Score every node's embedding distortion on a corrupted dataset and look
//! at where the scores land.
//!
//! A tenth of the points are displaced onto class-centroid midpoints, which
//! wires dense corridors between the classes. The per-node score compares
//! each input-graph neighborhood against the spectral embedding's
//! neighborhood structure; the lowest-scoring nodes are the ones whose
//! surroundings the embedding preserves best, and those are the nodes the
//! robust pipeline keeps.
//!
//! ```text
//! cargo run --example spade_scores
//! ```

use robust_spectral::{add_bridge_noise, make_blobs, robustness_report, Result};

fn main() -> Result<()> {
    let clean = make_blobs(200, 3, 2, 0.08, 0, 1)?;
    let (noisy, displaced) = add_bridge_noise(&clean, 0.10, 1)?;
    println!(
        "{}: {} nodes, {} displaced into inter-class corridors",
        noisy.name(),
        noisy.n(),
        displaced.len()
    );

    let report = robustness_report(&noisy, 10, 3, 3, 1)?;
    println!("distortion directions (generalized eigenvalues): {:?}", rounded(&report.eigenvalues));

    let mut sorted = report.scores.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let pick = |q: f64| sorted[((sorted.len() - 1) as f64 * q) as usize];
    println!(
        "score quartiles: min {:.4}  p25 {:.4}  median {:.4}  p75 {:.4}  max {:.4}",
        pick(0.0),
        pick(0.25),
        pick(0.5),
        pick(0.75),
        pick(1.0)
    );

    // The ranking is ascending by score: the head is the robust subset the
    // pipeline would keep, the tail is what it discards.
    let keep = &report.ranking[..5];
    let drop = &report.ranking[report.ranking.len() - 5..];
    println!("most robust nodes:  {keep:?}");
    println!("least robust nodes: {drop:?}");
    Ok(())
}

fn rounded(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| (v * 1e3).round() / 1e3).collect()
}
