//! Build the symmetric k-nearest-neighbor graph behind every pipeline stage,
//! inspect its shape, and dump it as an edge list.
//!
//! ```text
//! cargo run --example knn_graph
//! ```

use std::io::Write as _;

use robust_spectral::{build_knn_graph, connected_components, make_blobs, Metric, Result};

fn main() -> Result<()> {
    // Two well-separated classes: the 5-NN graph splits into two components.
    let ps = make_blobs(60, 2, 2, 0.05, 0, 7)?;
    let g = build_knn_graph(&ps, 5, Metric::Euclidean)?;

    let degrees: Vec<usize> = (0..g.n()).map(|i| g.neighbors(i).len()).collect();
    let (min_deg, max_deg) = (
        degrees.iter().min().unwrap(),
        degrees.iter().max().unwrap(),
    );
    println!("graph on {} nodes, degrees {min_deg}..{max_deg}", g.n());
    // Union symmetrization keeps at least k neighbors per node and adds the
    // back edges, so degrees sit at or a little above k.

    let components = connected_components(&g);
    let n_components = components.iter().max().unwrap() + 1;
    println!("connected components: {n_components}");

    let mut edge_list = Vec::new();
    g.write_edge_list(&mut edge_list)?;
    let text = String::from_utf8(edge_list).expect("edge list is ASCII");
    println!("edge list head:");
    for line in text.lines().take(5) {
        println!("  {line}");
    }
    let path = std::env::temp_dir().join("knn_graph.edges");
    let mut file = std::fs::File::create(&path)?;
    file.write_all(text.as_bytes())?;
    println!("full edge list written to {}", path.display());
    Ok(())
}
