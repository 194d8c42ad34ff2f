//! Per-layer edge-weight normalization. Vertex weights are never touched.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{GraphError, Result};
use crate::graph::DoublyWeightedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalizationScheme {
    /// Rescale so the mean edge weight is 1.
    Mean,
    /// Affine map of `[min, max]` onto `[lo, hi]`.
    Bounded { lo: f64, hi: f64 },
}

impl NormalizationScheme {
    pub const DEFAULT_BOUNDED: NormalizationScheme = NormalizationScheme::Bounded { lo: 1.0, hi: 10.0 };

    pub fn bounded(lo: f64, hi: f64) -> Result<Self> {
        check_range(lo, hi)?;
        Ok(NormalizationScheme::Bounded { lo, hi })
    }

    pub fn apply(&self, g: &DoublyWeightedGraph) -> Result<DoublyWeightedGraph> {
        match *self {
            NormalizationScheme::Mean => mean_normalize(g),
            NormalizationScheme::Bounded { lo, hi } => bounded_scale(g, (lo, hi)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NormalizationScheme::Mean => "mean",
            NormalizationScheme::Bounded { .. } => "bounded",
        }
    }
}

impl fmt::Display for NormalizationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizationScheme::Mean => f.write_str("mean"),
            NormalizationScheme::Bounded { lo, hi } => write!(f, "bounded[{lo},{hi}]"),
        }
    }
}

impl FromStr for NormalizationScheme {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(NormalizationScheme::Mean),
            "bounded" => Ok(NormalizationScheme::DEFAULT_BOUNDED),
            other => Err(GraphError::InvalidSpec(format!(
                "unknown normalization {other:?} (expected mean or bounded)"
            ))),
        }
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi {
        Ok(())
    } else {
        Err(GraphError::InvalidRange { lo, hi })
    }
}

pub fn mean_normalize(g: &DoublyWeightedGraph) -> Result<DoublyWeightedGraph> {
    if g.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let w = g.edge_weights();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    g.with_edge_weights(&w.iter().map(|x| x / mean).collect::<Vec<_>>())
}

/// Maps min → `lo` and max → `hi` exactly; when all weights are equal every
/// weight becomes `lo`.
pub fn bounded_scale(g: &DoublyWeightedGraph, range: (f64, f64)) -> Result<DoublyWeightedGraph> {
    let (lo, hi) = range;
    check_range(lo, hi)?;
    if g.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let w = g.edge_weights();
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = if max == min {
        vec![lo; w.len()]
    } else {
        w.iter()
            .map(|&x| {
                if x == min {
                    lo
                } else if x == max {
                    hi
                } else {
                    lo + (hi - lo) * (x - min) / (max - min)
                }
            })
            .collect()
    };
    g.with_edge_weights(&scaled)
}

/// Applies `scheme` to each layer independently.
pub fn normalize_layers(
    layers: &[DoublyWeightedGraph],
    scheme: NormalizationScheme,
) -> Result<Vec<DoublyWeightedGraph>> {
    if layers.is_empty() {
        return Err(GraphError::EmptyLayerList);
    }
    layers.iter().map(|g| scheme.apply(g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::erdos_renyi_weighted;
    use proptest::prelude::*;

    fn path_with(weights: &[f64]) -> DoublyWeightedGraph {
        let edges: Vec<_> = (0..weights.len()).map(|i| (i, i + 1)).collect();
        DoublyWeightedGraph::new(weights.len() + 1, &edges, &vec![0.5; weights.len() + 1], weights).unwrap()
    }

    fn mean_of(g: &DoublyWeightedGraph) -> f64 {
        g.edge_weights().iter().sum::<f64>() / g.edge_count() as f64
    }

    #[test]
    fn mean_normalize_examples() {
        let g = mean_normalize(&path_with(&[2.0, 4.0])).unwrap();
        assert_eq!(g.edge_weights(), vec![2.0 / 3.0, 4.0 / 3.0]);
        assert_eq!(mean_normalize(&path_with(&[3.5; 4])).unwrap().edge_weights(), vec![1.0; 4]);

        let g = mean_normalize(&path_with(&[0.1, 1000.0, 1.0, 1.0])).unwrap();
        assert!((mean_of(&g) - 1.0).abs() < 1e-12);
        let w = g.edge_weights();
        assert!((w[1] / w[0] - 10000.0).abs() < 1e-8);
        assert_eq!(g.vertex_weights(), &[0.5; 5]);
    }

    #[test]
    fn bounded_examples() {
        let g = bounded_scale(&path_with(&[0.1, 1000.0]), (1.0, 10.0)).unwrap();
        assert_eq!(g.edge_weights(), vec![1.0, 10.0]);
        let g = bounded_scale(&path_with(&[4.0; 3]), (1.0, 10.0)).unwrap();
        assert_eq!(g.edge_weights(), vec![1.0; 3]);
        let g = bounded_scale(&path_with(&[2.0, 5.0, 8.0]), (1.0, 10.0)).unwrap();
        assert_eq!(g.edge_weights(), vec![1.0, 5.5, 10.0]);
    }

    #[test]
    fn errors() {
        let empty = DoublyWeightedGraph::unweighted(3, &[]).unwrap();
        assert_eq!(mean_normalize(&empty), Err(GraphError::NoEdges));
        assert_eq!(bounded_scale(&empty, (1.0, 10.0)), Err(GraphError::NoEdges));
        assert!(matches!(
            bounded_scale(&path_with(&[1.0]), (10.0, 1.0)),
            Err(GraphError::InvalidRange { .. })
        ));
        assert!(NormalizationScheme::bounded(0.0, 1.0).is_err());
        assert_eq!(normalize_layers(&[], NormalizationScheme::Mean), Err(GraphError::EmptyLayerList));
    }

    #[test]
    fn per_layer() {
        let layers = vec![
            erdos_renyi_weighted(20, 0.3, (0.1, 1.0), (1.0, 5.0), 1),
            erdos_renyi_weighted(20, 0.3, (0.1, 1.0), (50.0, 500.0), 2),
            erdos_renyi_weighted(20, 0.3, (0.1, 1.0), (0.1, 1000.0), 3),
        ];
        assert_eq!(
            normalize_layers(&layers[..1], NormalizationScheme::Mean).unwrap()[0],
            mean_normalize(&layers[0]).unwrap()
        );
        for g in normalize_layers(&layers[..2], NormalizationScheme::Mean).unwrap() {
            assert!((mean_of(&g) - 1.0).abs() < 1e-12);
        }
        for g in normalize_layers(&layers, NormalizationScheme::DEFAULT_BOUNDED).unwrap() {
            let w = g.edge_weights();
            assert_eq!(w.iter().copied().fold(f64::INFINITY, f64::min), 1.0);
            assert_eq!(w.iter().copied().fold(f64::NEG_INFINITY, f64::max), 10.0);
        }
    }

    proptest! {
        #[test]
        fn normalizations_are_idempotent(ws in proptest::collection::vec(0.01f64..1000.0, 1..30)) {
            let g = path_with(&ws);
            let once = mean_normalize(&g).unwrap();
            prop_assert!((mean_of(&once) - 1.0).abs() < 1e-12);
            let twice = mean_normalize(&once).unwrap();
            for (a, b) in once.edge_weights().iter().zip(twice.edge_weights()) {
                prop_assert!((a - b).abs() <= 1e-12 * a);
            }
            for (i, j) in [(0, ws.len() - 1), (ws.len() / 2, 0)] {
                let ratio = ws[i] / ws[j];
                let w = once.edge_weights();
                prop_assert!((w[i] / w[j] - ratio).abs() <= 1e-12 * ratio);
            }

            let b1 = bounded_scale(&g, (1.0, 10.0)).unwrap();
            let b2 = bounded_scale(&b1, (1.0, 10.0)).unwrap();
            for (a, b) in b1.edge_weights().iter().zip(b2.edge_weights()) {
                prop_assert!((a - b).abs() <= 1e-12 * a);
            }
        }
    }
}
