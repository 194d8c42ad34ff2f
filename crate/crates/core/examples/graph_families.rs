//! Forman curvature on the textbook families, unit weights.
//!
//! Run with `cargo run --example graph_families`.

use multiplex_forman::curvature::monolayer_curvatures;
use multiplex_forman::generators::{complete, cycle, regular_tree};

fn main() {
    println!("{:<14} {:>6} {:>10} {:>10}", "graph", "edges", "min F", "max F");
    let show = |name: String, g: multiplex_forman::graph::DoublyWeightedGraph| {
        let f = monolayer_curvatures(&g);
        let min = f.iter().copied().fold(f64::INFINITY, f64::min);
        let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("{name:<14} {:>6} {min:>10} {max:>10}", g.edge_count());
    };
    for n in [4, 6, 8] {
        show(format!("complete({n})"), complete(n));
        show(format!("cycle({n})"), cycle(n));
    }
    // leaf edges sit at 3 - r, internal ones at 4 - 2r
    for r in [3, 4] {
        show(format!("tree({r}, 3)"), regular_tree(r, 3));
    }
}
