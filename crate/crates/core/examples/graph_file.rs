//! Builds a small multiplex graph, writes it in the JSON format and reads it
//! back.
//!
//! Run with `cargo run --example graph_file`.

use multiplex_forman::graph::{DoublyWeightedGraph, CompileGraph};
use multiplex_forman::io::{parse_graph, serialize_graph, GraphDocument};

fn main() {
    let road = DoublyWeightedGraph::new(4, &[(0, 1), (1, 2), (2, 3)], &[1.0, 0.5, 0.5, 1.0], &[2.0, 1.0, 3.0]).unwrap();
    let rail = DoublyWeightedGraph::new(4, &[(0, 2), (1, 3), (2, 3)], &[1.0, 0.5, 0.5, 1.0], &[1.0, 1.0, 4.0]).unwrap();
    let mut doc = GraphDocument::compile(CompileGraph::compile(&[road, rail]).unwrap());
    doc.labels = Some(["north", "east", "south", "west"].map(String::from).to_vec());

    let text = serialize_graph(&doc);
    print!("{text}");
    let back = parse_graph(&text).unwrap();
    assert_eq!(back, doc);
    println!("round trip ok: {} edges incl. derived inter-layer edges", back.multiplex().edges().len());
}
