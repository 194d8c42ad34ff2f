//! Which weights the karate-club curvature is most sensitive to.
//!
//! Run with `cargo run --example karate_sensitivity`.

use multiplex_forman::generators::{generate, GeneratorSpec, GraphKind};
use multiplex_forman::sensitivity::{sensitivity_map, stability_summary};

fn main() {
    let g = generate(&GeneratorSpec::new(GraphKind::KarateClub, 7)).expect("bundled graph");
    let mut records = sensitivity_map(&g);
    records.retain(|r| r.dimensionless.value().is_some());
    records.sort_by(|a, b| {
        let (x, y) = (a.dimensionless.value().unwrap().abs(), b.dimensionless.value().unwrap().abs());
        y.total_cmp(&x)
    });
    println!("{} (edge, parameter) pairs; ten largest |S_p|:", records.len());
    for r in records.iter().take(10) {
        println!(
            "  edge {:?} {:<9} F = {:>8.3}  dF/dp = {:>8.4}  S_p = {:>8.4}",
            r.edge,
            r.parameter.to_string(),
            r.curvature,
            r.partial,
            r.dimensionless.value().unwrap()
        );
    }
    for spread in [0.05, 0.2, 0.5] {
        let s = stability_summary(&g, (1.0 - spread, 1.0 + spread), 0.9, 1).unwrap();
        println!(
            "±{:>3.0}% weights: spearman {:.3}, sign changes {}, max |ΔF| {:.3}",
            spread * 100.0,
            s.spearman,
            s.sign_changes,
            s.max_abs_change
        );
    }
}
