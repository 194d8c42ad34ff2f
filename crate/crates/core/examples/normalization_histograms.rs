//! Curvature histograms of one wide-weight graph under both normalization
//! schemes. Bounded scaling squeezes the heavy tail that mean scaling keeps.
//!
//! Run with `cargo run --release --example normalization_histograms`.

use multiplex_forman::curvature::monolayer_curvatures;
use multiplex_forman::generators::erdos_renyi_weighted;
use multiplex_forman::normalization::NormalizationScheme;
use multiplex_forman::pipeline::histogram;

fn main() {
    let g = erdos_renyi_weighted(200, 0.5, (0.01, 1.0), (0.1, 1000.0), 2024);
    for scheme in [NormalizationScheme::Mean, NormalizationScheme::DEFAULT_BOUNDED] {
        let values = monolayer_curvatures(&scheme.apply(&g).unwrap());
        let h = histogram(scheme, &values, 12);
        println!("{scheme}: range [{:.1}, {:.1}], std {:.2}", h.min, h.max, h.std);
        let peak = h.bins.iter().map(|b| b.2).max().unwrap_or(1);
        for (lo, _, count) in &h.bins {
            println!("  {lo:>9.1} | {}", "#".repeat(count * 50 / peak));
        }
    }
}
