//! Drive a full experiment from config text, exactly as the `run`
//! subcommand does, and read the report file back.
//!
//! ```text
//! cargo run --release --example experiment_run
//! ```

use robust_spectral::{run_experiment, write_report, ExperimentConfig, ExperimentReport, Result};

fn main() -> Result<()> {
    // The same flat `key = value` syntax a config file holds. `bridge=0.1`
    // displaces 10% of the blob points onto class-centroid midpoints, so the
    // baseline has something to lose.
    let config = ExperimentConfig::parse_str(
        "dataset.kind = blobs\n\
         dataset.path = 200x3,spread=0.08,bridge=0.1\n\
         k_clusters = 3\n\
         k_nn = 10\n\
         m_nodes = 200\n\
         m_eigs = 3\n\
         seed = 1\n",
    )?;

    let report = run_experiment(&config)?;
    println!(
        "{}: baseline {:.2}% vs robust {:.2}%",
        report.dataset,
        100.0 * report.acc_baseline.expect("blobs are labeled"),
        100.0 * report.acc_robust.expect("blobs are labeled"),
    );
    for (stage, secs) in &report.stage_seconds {
        println!("  {stage:<28} {secs:>8.4}s");
    }
    // At this toy size the timing fields are noise (the corrupted graph is
    // even disconnected, so the baseline's embedding needs no eigensolve at
    // all); the eig_time/speedup fields earn their keep at survey scale.

    // Reports persist in the lossless machine format; parse_machine is its
    // exact inverse, so tooling can diff non-timing fields across runs.
    let dir = std::env::temp_dir().join("robust-spectral-demo");
    let path = write_report(&report, &dir)?;
    let restored = ExperimentReport::parse_machine(&std::fs::read_to_string(&path)?)?;
    assert_eq!(restored, report);
    println!("report round-tripped through {}", path.display());
    Ok(())
}
