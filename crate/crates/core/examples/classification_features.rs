//! Feature matrix for the bridge-vs-rewired dataset, written as CSV.
//!
//! Run with `cargo run --release --example classification_features > features.csv`.

use multiplex_forman::dataset::{bridge_dataset, feature_matrix, BridgeDatasetConfig};
use multiplex_forman::features::{CE_STAT_NAMES, DEFAULT_WL_ITERATIONS};
use multiplex_forman::stats::mean;

fn main() {
    let samples = bridge_dataset(&BridgeDatasetConfig {
        count: 60,
        seed: 1,
        ..Default::default()
    })
    .unwrap();
    let matrix = feature_matrix(&samples, DEFAULT_WL_ITERATIONS);

    for (i, name) in CE_STAT_NAMES.iter().enumerate() {
        let by_class = |label: &str| {
            let v: Vec<f64> = matrix.rows.iter().filter(|r| r.label == label).map(|r| r.ce_stats[i]).collect();
            mean(&v)
        };
        eprintln!("CE {name:<18} A {:>10.3}  B {:>10.3}", by_class("A"), by_class("B"));
    }
    matrix.write_csv(std::io::stdout().lock()).unwrap();
}
