//! Weakness identification on the two three-layer experiments: layers drawn
//! at p = 0.2, 0.5, 0.8 against three layers at p = 0.8.
//!
//! Run with `cargo run --example compile_weakness [seed]`.

use multiplex_forman::evaluation::{difference_scores, identify_weakness};
use multiplex_forman::generators::{build_compile_experiment, cg258_specs, cg888_specs};
use multiplex_forman::graph::CompileGraph;
use multiplex_forman::normalization::{normalize_layers, NormalizationScheme};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2024);
    for (name, specs) in [("G(25,.2)+G(25,.5)+G(25,.8)", cg258_specs()), ("3 x G(25,.8)", cg888_specs())] {
        let raw = build_compile_experiment(&specs, seed).unwrap();
        let layers = normalize_layers(raw.sources(), NormalizationScheme::DEFAULT_BOUNDED).unwrap();
        let cg = CompileGraph::compile(&layers).unwrap();
        let report = difference_scores(&cg);
        let finding = identify_weakness(&cg).unwrap();
        println!("{name}");
        println!("  difference spread {:.4}", report.spread());
        for row in finding.ranking.iter().take(3) {
            println!("  vertex {:>2}: CE {:>9.3}  CE^uni {:>9.3}  diff {:>7.3}", row.vertex, row.ce, row.ce_uni, row.difference);
        }
        println!(
            "  -> vertex {}, layer {}, edge {:?} (F = {:.3}){}",
            finding.vertex,
            finding.layer,
            finding.edge,
            finding.curvature,
            if finding.low_confidence { ", low confidence" } else { "" }
        );
    }
}
