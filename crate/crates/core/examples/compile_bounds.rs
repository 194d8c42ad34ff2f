//! Inter-layer curvature on a compile graph, with the Γ partition and the
//! closed-form bounds for each edge at one vertex.
//!
//! Run with `cargo run --example compile_bounds`.

use multiplex_forman::curvature::{forman_inter_compile, forman_multiplex, gamma_partition, inter_curvature_bounds};
use multiplex_forman::generators::{build_compile_experiment, GeneratorSpec, GraphKind};
use multiplex_forman::graph::StateVertex;

fn main() {
    let specs: Vec<_> = [0.2, 0.4, 0.6, 0.8]
        .iter()
        .map(|&p| GeneratorSpec::new(GraphKind::ErdosRenyi { n: 12, p }, 0))
        .collect();
    let cg = build_compile_experiment(&specs, 42).expect("valid specs");
    let x = 3;
    println!("W profile of vertex {x}: {:?}", cg.w_profile(x));
    println!("{:>7} {:>5} {:>5} {:>10} {:>10} {:>10} {:>10}", "pair", "|Γ-|", "|Γ+|", "F", "stated lo", "safe lo", "upper");
    for i in 0..cg.layer_count() {
        for j in i + 1..cg.layer_count() {
            let (a, b) = (StateVertex::new(x, i), StateVertex::new(x, j));
            let f = forman_inter_compile(&cg, a, b).unwrap();
            assert!((f - forman_multiplex(cg.graph(), a, b).unwrap()).abs() < 1e-9);
            let part = gamma_partition(&cg, a, b).unwrap();
            let bounds = inter_curvature_bounds(&cg, a, b).unwrap();
            println!(
                "{:>3}-{:<3} {:>5} {:>5} {f:>10.4} {:>10.4} {:>10.4} {:>10.4}",
                i + 1,
                j + 1,
                part.minus.len(),
                part.plus.len(),
                bounds.lower,
                bounds.lower_corrected,
                bounds.upper
            );
        }
    }
}
