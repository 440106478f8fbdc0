//! Load an edge list (or fall back to a built-in graph) and print the
//! quantities every other routine depends on.
//!
//! ```text
//! cargo run --example graph_stats -- my_graph.txt
//! ```

use logwalk::graph::{generators, load_graph, LoadOptions};

fn main() -> logwalk::Result<()> {
    let g = match std::env::args().nth(1) {
        Some(path) => load_graph(path, LoadOptions::default())?,
        None => generators::connected_erdos_renyi(12, 0.3, 0.5, 2.0, 1),
    };

    println!("n = {}, edges = {}", g.n(), g.edge_count());
    println!("vol = {:.4}", g.volume());
    println!("degree ratio = {:.4}", g.degree_ratio()?);
    println!("components = {}", g.connected_components().len());
    if g.is_connected() {
        println!("hop diameter = {}", g.hop_diameter()?);
        println!("λ₂ ≥ {:.3e}", g.lambda2_lower_bound()?);
    }

    // anything proportional to √d is in the kernel of L
    let p = g.project_to_image(&g.null_vector())?;
    println!("|proj(√d)| = {:.1e}", p.norm());
    Ok(())
}
