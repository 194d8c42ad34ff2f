//! Vertex scoring on compile graphs and the weakness-identification cascade.
//!
//! `CE(x)` sums the inter-layer curvature of every copy pair `(x^i, x^j)`,
//! `i < j`. `CE^uni(x)` is the same sum evaluated on a configuration where
//! all copies of `x` share one `W` value, vertex weights unchanged. Their
//! difference grows with the spread of `W(x^1), …, W(x^L)`.
//!
//! Copies with `W = 0` carry no inter-layer edges; they are left out of both
//! sums and listed in `degenerate_layers`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::curvature::{forman_inter_compile, forman_multiplex};
use crate::error::{GraphError, Result};
use crate::graph::{CompileGraph, DoublyWeightedGraph, LayerId, StateVertex};

fn check_vertex(cg: &CompileGraph, x: usize) -> Result<()> {
    if x >= cg.vertex_count() {
        return Err(GraphError::IndexOutOfRange {
            vertex: x,
            n: cg.vertex_count(),
        });
    }
    Ok(())
}

fn live_layers(cg: &CompileGraph, x: usize) -> Vec<usize> {
    (0..cg.layer_count())
        .filter(|&i| !cg.is_degenerate(StateVertex::new(x, i)))
        .collect()
}

/// `CE(x)`; uses the closed form, which agrees with the general curvature on
/// compile graphs.
pub fn comprehensive_evaluation(cg: &CompileGraph, x: usize) -> Result<f64> {
    check_vertex(cg, x)?;
    let live = live_layers(cg, x);
    let mut total = 0.0;
    for (k, &i) in live.iter().enumerate() {
        for &j in &live[k + 1..] {
            total += forman_inter_compile(cg, StateVertex::new(x, i), StateVertex::new(x, j))?;
        }
    }
    Ok(total)
}

/// Two-vertex compile graph whose layer `l` is a unit edge with vertex
/// weight `m[l]`, so every copy has `W = 1`.
fn uniform_configuration(m: &[f64]) -> Result<CompileGraph> {
    let layers = m
        .iter()
        .map(|&ml| DoublyWeightedGraph::new(2, &[(0, 1)], &[ml, ml], &[1.0]))
        .collect::<Result<Vec<_>>>()?;
    CompileGraph::compile(&layers)
}

/// `CE^uni(x)`: `CE` evaluated on an equal-`W` configuration with the same
/// vertex weights. Equals `-(L' - 2) Σ_{i<j} (m(x^i) + m(x^j))` over the `L'`
/// non-degenerate copies.
pub fn ce_uniform(cg: &CompileGraph, x: usize) -> Result<f64> {
    check_vertex(cg, x)?;
    let live = live_layers(cg, x);
    if live.len() < 2 {
        return Ok(0.0);
    }
    let m: Vec<f64> = live
        .iter()
        .map(|&i| cg.graph().vertex_weight(StateVertex::new(x, i)))
        .collect();
    comprehensive_evaluation(&uniform_configuration(&m)?, 0)
}

/// The shorter closed form `-Σ_{i<j} (m(x^i) + m(x^j))`, reported next to
/// [`ce_uniform`]. It has no `(L - 2)` factor, so the two agree only at `L = 3`.
pub fn ce_uniform_unscaled(cg: &CompileGraph, x: usize) -> Result<f64> {
    check_vertex(cg, x)?;
    let live = live_layers(cg, x);
    let m = |i: usize| cg.graph().vertex_weight(StateVertex::new(x, i));
    let mut total = 0.0;
    for (k, &i) in live.iter().enumerate() {
        for &j in &live[k + 1..] {
            total -= m(i) + m(j);
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationRow {
    pub vertex: usize,
    pub ce: f64,
    pub ce_uni: f64,
    pub ce_uni_unscaled: f64,
    pub difference: f64,
    pub degenerate_layers: Vec<LayerId>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub rows: Vec<EvaluationRow>,
}

impl EvaluationReport {
    pub fn differences(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.difference).collect()
    }

    /// `max - min` of the difference column.
    pub fn spread(&self) -> f64 {
        let d = self.differences();
        if d.is_empty() {
            return 0.0;
        }
        let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

pub fn evaluate_vertex(cg: &CompileGraph, x: usize) -> Result<EvaluationRow> {
    let ce = comprehensive_evaluation(cg, x)?;
    let ce_uni = ce_uniform(cg, x)?;
    Ok(EvaluationRow {
        vertex: x,
        ce,
        ce_uni,
        ce_uni_unscaled: ce_uniform_unscaled(cg, x)?,
        difference: ce - ce_uni,
        degenerate_layers: (0..cg.layer_count())
            .filter(|&i| cg.is_degenerate(StateVertex::new(x, i)))
            .map(LayerId::from_index)
            .collect(),
    })
}

/// One row per vertex, in vertex order.
pub fn difference_scores(cg: &CompileGraph) -> EvaluationReport {
    let rows = (0..cg.vertex_count())
        .map(|x| evaluate_vertex(cg, x).expect("vertex ids come from the graph"))
        .collect();
    EvaluationReport { rows }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerSum {
    pub layer: LayerId,
    pub sum: f64,
    pub edges: usize,
    /// No intra-layer edge at this copy; `sum` is 0 by convention.
    pub isolated: bool,
}

/// For each layer, the summed multiplex curvature of the intra-layer edges
/// at `x^i`.
pub fn intra_curvature_sums_by_layer(cg: &CompileGraph, x: usize) -> Result<Vec<LayerSum>> {
    check_vertex(cg, x)?;
    let g = cg.graph();
    (0..cg.layer_count())
        .map(|i| {
            let here = StateVertex::new(x, i);
            let mut sum = 0.0;
            let mut edges = 0;
            for (y, _) in g.intra_neighbors(here) {
                sum += forman_multiplex(g, here, y)?;
                edges += 1;
            }
            Ok(LayerSum {
                layer: LayerId::from_index(i),
                sum,
                edges,
                isolated: edges == 0,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeScore {
    pub edge: (usize, usize),
    pub curvature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeaknessFinding {
    pub vertex: usize,
    pub layer: LayerId,
    pub edge: (usize, usize),
    pub difference: f64,
    pub layer_sum: f64,
    pub curvature: f64,
    /// The top difference is shared by more than one vertex, so the vertex
    /// pick rests on the smallest-id tie-break.
    pub low_confidence: bool,
    /// Vertices ranked by difference, largest first (ties by id).
    pub ranking: Vec<EvaluationRow>,
    pub layer_sums: Vec<LayerSum>,
    pub edge_scores: Vec<EdgeScore>,
}

/// Index of the largest value, the earliest one on ties.
fn argmax_first(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v.total_cmp(&b) == Ordering::Greater) {
            best = Some((idx, v));
        }
    }
    best.map(|(idx, _)| idx)
}

/// Runs the difference ranking, the per-layer intra-curvature sums and the
/// per-edge curvature pick on an already normalized compile graph.
///
/// Layers where the chosen vertex is isolated cannot supply an edge and are
/// skipped by the layer pick.
pub fn identify_weakness(cg: &CompileGraph) -> Result<WeaknessFinding> {
    if cg.layer_count() < 2 {
        return Err(GraphError::TooFewLayers {
            required: 2,
            actual: cg.layer_count(),
        });
    }
    let report = difference_scores(cg);
    let vertex = argmax_first(report.rows.iter().map(|r| r.difference))
        .ok_or_else(|| GraphError::DegenerateGraph("graph has no vertices".into()))?;
    let best = report.rows[vertex].difference;
    let low_confidence = report.rows.iter().filter(|r| r.difference == best).count() > 1;

    let layer_sums = intra_curvature_sums_by_layer(cg, vertex)?;
    let candidates: Vec<&LayerSum> = layer_sums.iter().filter(|s| !s.isolated).collect();
    let pick = argmax_first(candidates.iter().map(|s| s.sum)).ok_or_else(|| {
        GraphError::DegenerateGraph(format!("vertex {vertex} has no intra-layer edges"))
    })?;
    let layer = candidates[pick].layer;
    let layer_sum = candidates[pick].sum;

    let g = cg.graph();
    let here = StateVertex {
        vertex,
        layer,
    };
    let edge_scores = g
        .intra_neighbors(here)
        .map(|(y, _)| {
            Ok(EdgeScore {
                edge: (vertex, y.vertex),
                curvature: forman_multiplex(g, here, y)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let chosen = argmax_first(edge_scores.iter().map(|s| s.curvature))
        .expect("non-isolated layer has an edge");

    let mut ranking = report.rows.clone();
    ranking.sort_by(|a, b| b.difference.total_cmp(&a.difference).then(a.vertex.cmp(&b.vertex)));

    Ok(WeaknessFinding {
        vertex,
        layer,
        edge: edge_scores[chosen].edge,
        difference: best,
        layer_sum,
        curvature: edge_scores[chosen].curvature,
        low_confidence,
        ranking,
        layer_sums,
        edge_scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::inter_curvature_bounds;
    use crate::curvature::testing::engineered;
    use crate::generators::{build_compile_experiment, cg258_specs, cg888_specs, complete, erdos_renyi_weighted};
    use proptest::prelude::*;

    #[test]
    fn ce_small_cases() {
        let single = CompileGraph::compile(&[complete(4)]).unwrap();
        assert_eq!(comprehensive_evaluation(&single, 0).unwrap(), 0.0);

        let two = engineered(&[1.0, 3.0], &[0.4, 0.9]);
        let ce = comprehensive_evaluation(&two, 0).unwrap();
        assert!((ce - 0.9 * (1.0 - 1.0 / 3.0)).abs() < 1e-15);
        assert!(ce >= 0.0);

        let three = engineered(&[2.0; 3], &[1.0; 3]);
        assert_eq!(comprehensive_evaluation(&three, 0).unwrap(), -6.0);
    }

    #[test]
    fn ce_uniform_cases() {
        assert_eq!(ce_uniform(&engineered(&[1.0, 5.0], &[1.0; 2]), 0).unwrap(), 0.0);
        assert_eq!(ce_uniform(&engineered(&[1.0, 5.0, 2.0], &[1.0; 3]), 0).unwrap(), -6.0);
        assert_eq!(ce_uniform(&engineered(&[1.0, 5.0, 2.0, 3.0], &[1.0; 4]), 0).unwrap(), -24.0);
        // the unscaled closed form disagrees away from L = 3
        let l4 = engineered(&[1.0, 5.0, 2.0, 3.0], &[1.0; 4]);
        assert_eq!(ce_uniform_unscaled(&l4, 0).unwrap(), -12.0);
        let l2 = engineered(&[1.0, 5.0], &[1.0; 2]);
        assert_eq!(ce_uniform_unscaled(&l2, 0).unwrap(), -2.0);
    }

    #[test]
    fn ce_uniform_matches_closed_expression() {
        let m = [0.3, 0.8, 1.7, 0.05, 1.1];
        let cg = engineered(&[1.0, 2.0, 3.0, 4.0, 5.0], &m);
        let mut expected = 0.0;
        for i in 0..5 {
            for j in i + 1..5 {
                expected -= 3.0 * (m[i] + m[j]);
            }
        }
        assert!((ce_uniform(&cg, 0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn uniform_configuration_agrees_with_general_curvature() {
        let m = [0.3, 0.8, 1.7, 0.05];
        let config = uniform_configuration(&m).unwrap();
        let g = config.graph();
        let general: f64 = g
            .edges()
            .iter()
            .filter(|e| e.kind() == crate::graph::EdgeKind::Inter && e.a.vertex == 0)
            .map(|e| forman_multiplex(g, e.a, e.b).unwrap())
            .sum();
        let ce = ce_uniform(&engineered(&[1.0, 2.0, 3.0, 4.0], &m), 0).unwrap();
        assert!((general - ce).abs() < 1e-12);
    }

    #[test]
    fn equal_w_collapses_ce_onto_uniform() {
        let m = [0.3, 0.8, 1.7, 0.05];
        let cg = engineered(&[1.7; 4], &m);
        assert_eq!(comprehensive_evaluation(&cg, 0).unwrap(), ce_uniform(&cg, 0).unwrap());
    }

    #[test]
    fn identical_layers_have_zero_difference() {
        let g = erdos_renyi_weighted(15, 0.4, (0.01, 1.0), (1.0, 10.0), 8);
        let cg = CompileGraph::compile(&[g.clone(), g.clone(), g]).unwrap();
        let report = difference_scores(&cg);
        assert!(report.rows.iter().all(|r| r.difference == 0.0));
        let finding = identify_weakness(&cg).unwrap();
        assert_eq!(finding.vertex, 0);
        assert!(finding.low_confidence);
    }

    #[test]
    fn single_layer_rows_are_zero() {
        let cg = CompileGraph::compile(&[complete(5)]).unwrap();
        assert!(difference_scores(&cg)
            .rows
            .iter()
            .all(|r| r.ce == 0.0 && r.ce_uni == 0.0 && r.difference == 0.0));
        assert!(matches!(
            identify_weakness(&cg),
            Err(GraphError::TooFewLayers { .. })
        ));
    }

    #[test]
    fn layer_sums() {
        let cg = CompileGraph::compile(&[complete(3)]).unwrap();
        let sums = intra_curvature_sums_by_layer(&cg, 1).unwrap();
        assert_eq!(sums.len(), 1);
        assert_eq!((sums[0].sum, sums[0].edges), (0.0, 2));

        let l1 = DoublyWeightedGraph::unweighted(3, &[(1, 2)]).unwrap();
        let cg = CompileGraph::compile(&[l1, complete(3)]).unwrap();
        let sums = intra_curvature_sums_by_layer(&cg, 0).unwrap();
        assert!(sums[0].isolated && sums[0].sum == 0.0);
        assert!(!sums[1].isolated);
        let row = evaluate_vertex(&cg, 0).unwrap();
        assert_eq!(row.degenerate_layers, vec![LayerId::from_index(0)]);
        assert_eq!((row.ce, row.ce_uni), (0.0, 0.0));
    }

    #[test]
    fn degenerate_vertex_everywhere() {
        let a = DoublyWeightedGraph::unweighted(3, &[(1, 2)]).unwrap();
        let cg = CompileGraph::compile(&[a.clone(), a]).unwrap();
        // vertex 0 is isolated in both layers; all differences are 0 and the
        // smallest-id tie-break lands on it
        assert!(matches!(identify_weakness(&cg), Err(GraphError::DegenerateGraph(_))));
    }

    #[test]
    fn printed_ce_lower_bound_counterexample() {
        // m ≡ 1, W = (1, 2, 4): CE = -1 - 0.75 - 3.5
        let cg = engineered(&[1.0, 2.0, 4.0], &[1.0; 3]);
        let ce = comprehensive_evaluation(&cg, 0).unwrap();
        assert!((ce - -5.25).abs() < 1e-14);
        // only the pair (2, 3) has a non-empty Γ₋ = {1}: -(1 + 1)·1·(2/1)
        let printed_bound = -4.0;
        assert!(ce < printed_bound);
    }

    #[test]
    fn cg_experiments_are_deterministic_and_ordered() {
        let a = build_compile_experiment(&cg258_specs(), 2024).unwrap();
        let b = build_compile_experiment(&cg888_specs(), 2024).unwrap();
        let fa = identify_weakness(&a).unwrap();
        assert_eq!(fa, identify_weakness(&a).unwrap());
        assert!(!fa.low_confidence);
        assert!(difference_scores(&b).spread() < difference_scores(&a).spread());
    }

    fn arb_stack() -> impl Strategy<Value = CompileGraph> {
        (2usize..=4, any::<u64>()).prop_map(|(layers, seed)| {
            let ls: Vec<_> = (0..layers)
                .map(|l| erdos_renyi_weighted(8, 0.45, (0.05, 1.0), (1.0, 10.0), seed.wrapping_add(l as u64)))
                .collect();
            CompileGraph::compile(&ls).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ce_respects_summed_corrected_bounds(cg in arb_stack()) {
            for x in 0..cg.vertex_count() {
                let live = live_layers(&cg, x);
                let mut bound = 0.0;
                for (k, &i) in live.iter().enumerate() {
                    for &j in &live[k + 1..] {
                        bound += inter_curvature_bounds(&cg, StateVertex::new(x, i), StateVertex::new(x, j))
                            .unwrap()
                            .lower_corrected;
                    }
                }
                let ce = comprehensive_evaluation(&cg, x).unwrap();
                prop_assert!(ce >= bound - 1e-9 * bound.abs().max(1.0));
            }
        }

        #[test]
        fn weakness_selection_survives_m_scaling(cg in arb_stack(), factor in 0.1f64..10.0) {
            let base = identify_weakness(&cg);
            let scaled = identify_weakness(&cg.scale_vertex_weights(factor).unwrap());
            match (base, scaled) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!((a.vertex, a.layer, a.edge), (b.vertex, b.layer, b.edge));
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }
}
