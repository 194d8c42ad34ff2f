//! Forman curvature of edges in doubly-weighted graphs.
//!
//! For an edge `e = (x, y)`:
//!
//! ```text
//! F(e) = 2(m(x) + m(y)) - m(x) Σ_{(x,z)} √(w(e)/w(x,z)) - m(y) Σ_{(y,z)} √(w(e)/w(y,z))
//! ```
//!
//! Both sums run over every edge incident to the endpoint, `e` included, so
//! with unit weights `F(e) = 4 - deg(x) - deg(y)`. On multiplex graphs the
//! sums cover intra- and inter-layer incidences alike.
//!
//! Inter-layer edges of a compile graph also admit a closed form that only
//! depends on the `W` profile of the shared vertex, see [`forman_inter_compile`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GraphError, Result};
use crate::graph::{
    CompileGraph, DoublyWeightedGraph, EdgeKind, LayerId, MultiplexGraph, StateVertex,
};

fn monolayer_at(g: &DoublyWeightedGraph, idx: usize) -> f64 {
    let e = g.edge(idx);
    let endpoint_sum = |x: usize| -> f64 {
        g.incident(x)
            .iter()
            .map(|inc| (e.weight / g.edge(inc.edge).weight).sqrt())
            .sum()
    };
    let (mx, my) = (g.vertex_weight(e.u), g.vertex_weight(e.v));
    2.0 * (mx + my) - mx * endpoint_sum(e.u) - my * endpoint_sum(e.v)
}

pub fn forman_monolayer(g: &DoublyWeightedGraph, x: usize, y: usize) -> Result<f64> {
    Ok(monolayer_at(g, g.require_edge(x, y)?))
}

/// Curvature of every edge, in stored edge order.
pub fn monolayer_curvatures(g: &DoublyWeightedGraph) -> Vec<f64> {
    (0..g.edge_count())
        .into_par_iter()
        .map(|idx| monolayer_at(g, idx))
        .collect()
}

fn multiplex_at(g: &MultiplexGraph, idx: usize) -> f64 {
    let e = g.edge(idx);
    let endpoint_sum = |x: StateVertex| -> f64 {
        g.incident(x)
            .iter()
            .map(|inc| (e.weight / g.edge(inc.edge).weight).sqrt())
            .sum()
    };
    let (ma, mb) = (g.vertex_weight(e.a), g.vertex_weight(e.b));
    2.0 * (ma + mb) - ma * endpoint_sum(e.a) - mb * endpoint_sum(e.b)
}

/// General multiplex Forman curvature of any edge in `E_M`.
pub fn forman_multiplex(g: &MultiplexGraph, a: StateVertex, b: StateVertex) -> Result<f64> {
    Ok(multiplex_at(g, g.require_edge(a, b)?))
}

/// Layers of `Γ_C^{i,j}(x)` split by where their `W` falls relative to the
/// two endpoints. `low` is the endpoint with the smaller `W` (ties broken by
/// layer number), `high` the other one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaPartition {
    pub low: StateVertex,
    pub high: StateVertex,
    /// Every other layer joined to both endpoints.
    pub all: Vec<LayerId>,
    /// Layers with `W(x^k) <= min(W(x^i), W(x^j))`.
    pub minus: Vec<LayerId>,
    /// Layers with `W(x^k) >= max(W(x^i), W(x^j))`.
    pub plus: Vec<LayerId>,
}

fn require_inter(cg: &CompileGraph, a: StateVertex, b: StateVertex) -> Result<()> {
    let g = cg.graph();
    g.require_edge(a, b)?;
    if a.vertex != b.vertex || a.layer == b.layer {
        return Err(GraphError::NotAnInterEdge(format!("({a}, {b})")));
    }
    Ok(())
}

pub fn gamma_partition(cg: &CompileGraph, a: StateVertex, b: StateVertex) -> Result<GammaPartition> {
    require_inter(cg, a, b)?;
    let (low, high) = if (cg.big_w(a), a.layer) <= (cg.big_w(b), b.layer) {
        (a, b)
    } else {
        (b, a)
    };
    let (w_low, w_high) = (cg.big_w(low), cg.big_w(high));
    let mut all = Vec::new();
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for (other, _) in cg.graph().inter_neighbors(low) {
        if other.layer == high.layer {
            continue;
        }
        let w = cg.big_w(other);
        all.push(other.layer);
        if w <= w_low {
            minus.push(other.layer);
        }
        if w >= w_high {
            plus.push(other.layer);
        }
    }
    Ok(GammaPartition {
        low,
        high,
        all,
        minus,
        plus,
    })
}

/// Closed-form curvature of a compile-graph inter-layer edge.
///
/// With `x^i` the endpoint of smaller `W`, `ρ = W(x^i)/W(x^j)` and the
/// partition `Γ ⊇ Γ₋, Γ₊` of the remaining layers:
///
/// ```text
/// F = -m(x^i)|Γ \ Γ₋| + m(x^j)(1 - (|Γ₊| + 1)ρ)
///     - m(x^i) Σ_{k∈Γ₋} W(x^i)/W(x^k) - m(x^j) Σ_{l∈Γ\Γ₊} W(x^i)/W(x^l)
/// ```
pub fn forman_inter_compile(cg: &CompileGraph, a: StateVertex, b: StateVertex) -> Result<f64> {
    let part = gamma_partition(cg, a, b)?;
    Ok(closed_form(cg, &part))
}

fn closed_form(cg: &CompileGraph, part: &GammaPartition) -> f64 {
    let g = cg.graph();
    let (m_low, m_high) = (g.vertex_weight(part.low), g.vertex_weight(part.high));
    let w_low = cg.big_w(part.low);
    let rho = w_low / cg.big_w(part.high);
    let ratio = |layer: &LayerId| {
        w_low
            / cg.big_w(StateVertex {
                vertex: part.low.vertex,
                layer: *layer,
            })
    };
    let outside_minus = part.all.len() - part.minus.len();
    let minus_sum: f64 = part.minus.iter().map(ratio).sum();
    let not_plus_sum: f64 = part
        .all
        .iter()
        .filter(|l| !part.plus.contains(l))
        .map(ratio)
        .sum();
    -m_low * outside_minus as f64 + m_high * (1.0 - (part.plus.len() + 1) as f64 * rho)
        - m_low * minus_sum
        - m_high * not_plus_sum
}

/// Bounds on a compile-graph inter-layer curvature, oriented so that `low`
/// has the smaller `W`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterBounds {
    /// `-(m_i + m_j)|Γ₋| max_{Γ₋} W(x^i)/W(x^l) - m_j(ρ - 1)`, with the
    /// product term taken as 0 when `Γ₋` is empty.
    ///
    /// This only bounds `F` from below when `Γ = Γ₋`. A layer whose `W` lies
    /// strictly between the two endpoints contributes `-m_i - m_j·W(x^i)/W(x^k)`
    /// to `F` that this expression does not account for.
    pub lower: f64,
    /// `lower` with the `ρ` term dropped (its value at `W(x^i) = W(x^j)`).
    pub lower_coarse: f64,
    /// `lower - (m_i + m_j)|Γ \ Γ₋|`, a bound that holds on every edge.
    pub lower_corrected: f64,
    /// `-|Γ| m_i + m_j(1 - (|Γ| + 1)ρ)`; tight exactly when `Γ = Γ₊`.
    pub upper: f64,
    pub all_minus: bool,
    pub all_plus: bool,
}

pub fn inter_curvature_bounds(cg: &CompileGraph, a: StateVertex, b: StateVertex) -> Result<InterBounds> {
    let part = gamma_partition(cg, a, b)?;
    let g = cg.graph();
    let (m_low, m_high) = (g.vertex_weight(part.low), g.vertex_weight(part.high));
    let w_low = cg.big_w(part.low);
    let rho = w_low / cg.big_w(part.high);
    let max_ratio = part
        .minus
        .iter()
        .map(|&layer| {
            w_low
                / cg.big_w(StateVertex {
                    vertex: part.low.vertex,
                    layer,
                })
        })
        .fold(0.0_f64, f64::max);
    let minus_term = -(m_low + m_high) * part.minus.len() as f64 * max_ratio;
    let lower = minus_term - m_high * (rho - 1.0);
    let gamma = part.all.len() as f64;
    Ok(InterBounds {
        lower,
        lower_coarse: minus_term,
        lower_corrected: lower - (m_low + m_high) * (part.all.len() - part.minus.len()) as f64,
        upper: -gamma * m_low + m_high * (1.0 - (gamma + 1.0) * rho),
        all_minus: part.minus.len() == part.all.len(),
        all_plus: part.plus.len() == part.all.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeCurvature {
    pub a: StateVertex,
    pub b: StateVertex,
    pub kind: EdgeKind,
    pub value: f64,
    /// For compile-graph inter-layer edges: the layer of the endpoint with
    /// the smaller `W`.
    pub low_w_layer: Option<LayerId>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSummary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl CurvatureSummary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut count = 0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for v in values {
            count += 1;
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        if count == 0 {
            return CurvatureSummary {
                count,
                min: 0.0,
                max: 0.0,
                mean: 0.0,
            };
        }
        CurvatureSummary {
            count,
            min,
            max,
            mean: sum / count as f64,
        }
    }
}

/// One entry per edge, ordered by edge key.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub entries: Vec<EdgeCurvature>,
    pub summary: CurvatureSummary,
    pub intra: CurvatureSummary,
    pub inter: CurvatureSummary,
}

impl CurvatureReport {
    fn from_entries(entries: Vec<EdgeCurvature>) -> Self {
        let pick = |kind| entries.iter().filter(move |e| e.kind == kind).map(|e| e.value);
        CurvatureReport {
            summary: CurvatureSummary::of(entries.iter().map(|e| e.value)),
            intra: CurvatureSummary::of(pick(EdgeKind::Intra)),
            inter: CurvatureSummary::of(pick(EdgeKind::Inter)),
            entries,
        }
    }
}

pub fn curvature_report(g: &MultiplexGraph) -> CurvatureReport {
    let entries = (0..g.edges().len())
        .into_par_iter()
        .map(|idx| {
            let e = g.edge(idx);
            EdgeCurvature {
                a: e.a,
                b: e.b,
                kind: e.kind(),
                value: multiplex_at(g, idx),
                low_w_layer: None,
            }
        })
        .collect();
    CurvatureReport::from_entries(entries)
}

/// Like [`curvature_report`], with inter-layer orientation recorded.
pub fn compile_curvature_report(cg: &CompileGraph) -> CurvatureReport {
    let mut report = curvature_report(cg.graph());
    for entry in &mut report.entries {
        if entry.kind == EdgeKind::Inter {
            entry.low_w_layer = gamma_partition(cg, entry.a, entry.b)
                .ok()
                .map(|p| p.low.layer);
        }
    }
    report
}


#[cfg(test)]
mod tests {
    use super::testing::engineered;
    use super::*;
    use crate::generators::{complete, cycle, erdos_renyi_unweighted, regular_tree};
    use proptest::prelude::*;

    fn sv(v: usize, layer_index: usize) -> StateVertex {
        StateVertex::new(v, layer_index)
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn closed_form_families() {
        let k5 = complete(5);
        assert!(monolayer_curvatures(&k5).iter().all(|&f| f == -4.0));
        let c7 = cycle(7);
        assert!(monolayer_curvatures(&c7).iter().all(|&f| f == 0.0));
        let t3 = regular_tree(3, 3);
        for (e, f) in t3.edges().iter().zip(monolayer_curvatures(&t3)) {
            if t3.degree(e.u) == 3 && t3.degree(e.v) == 3 {
                assert_eq!(f, -2.0);
            }
        }
    }

    #[test]
    fn path_edge() {
        let p = DoublyWeightedGraph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(forman_monolayer(&p, 1, 0).unwrap(), 1.0);
        assert!(matches!(
            forman_monolayer(&p, 0, 2),
            Err(GraphError::EdgeNotFound(_))
        ));
    }

    #[test]
    fn weighted_edge_by_hand() {
        // edge (0,1) w=4, (0,2) w=1, (1,3) w=16; m = 1, 2, 1, 1
        let g = DoublyWeightedGraph::new(
            4,
            &[(0, 1), (0, 2), (1, 3)],
            &[1.0, 2.0, 1.0, 1.0],
            &[4.0, 1.0, 16.0],
        )
        .unwrap();
        // 2(1+2) - 1(1 + 2) - 2(1 + 0.5) = 0
        assert_eq!(forman_monolayer(&g, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn monolayer_multiplex_agree_for_single_layer() {
        let g = erdos_renyi_unweighted(15, 0.4, 3);
        let mg = MultiplexGraph::monolayer(&g);
        for e in g.edges() {
            assert_eq!(
                forman_monolayer(&g, e.u, e.v).unwrap(),
                forman_multiplex(&mg, sv(e.u, 0), sv(e.v, 0)).unwrap()
            );
        }
    }

    #[test]
    fn identical_layers_inter_edges_are_flat() {
        let g = erdos_renyi_unweighted(12, 0.5, 9);
        let cg = CompileGraph::compile(&[g.clone(), g]).unwrap();
        for e in cg.graph().edges().iter().filter(|e| e.kind() == EdgeKind::Inter) {
            assert!(forman_multiplex(cg.graph(), e.a, e.b).unwrap().abs() < 1e-12);
            assert_eq!(forman_inter_compile(&cg, e.a, e.b).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_layer_closed_form() {
        // W(x^1) = 0.5 <= W(x^2) = 2: F = m(x^2)(1 - 1/4)
        let cg = engineered(&[0.5, 2.0], &[0.3, 1.7]);
        let expected = 1.7 * (1.0 - 0.25);
        let f = forman_inter_compile(&cg, sv(0, 1), sv(0, 0)).unwrap();
        assert!(close(f, expected, 1e-14));
        assert!(close(forman_multiplex(cg.graph(), sv(0, 0), sv(0, 1)).unwrap(), expected, 1e-12));
    }

    #[test]
    fn three_layer_cases() {
        let (m1, m2, m3) = (0.7, 1.3, 0.4);
        // W1 <= W2 <= W3
        let (w1, w2, w3) = (1.0, 2.0, 5.0);
        let cg = engineered(&[w1, w2, w3], &[m1, m2, m3]);
        let expected = -m1 + m2 * (1.0 - 2.0 * w1 / w2);
        for f in [
            forman_inter_compile(&cg, sv(0, 0), sv(0, 1)).unwrap(),
            forman_multiplex(cg.graph(), sv(0, 0), sv(0, 1)).unwrap(),
        ] {
            assert!(close(f, expected, 1e-12), "{f} vs {expected}");
        }

        // W1 < W3 < W2
        let (w1, w2, w3) = (1.0, 5.0, 2.0);
        let cg = engineered(&[w1, w2, w3], &[m1, m2, m3]);
        let expected = -m1 + m2 * (1.0 - w1 / w2 - w1 / w3);
        assert!(close(forman_inter_compile(&cg, sv(0, 0), sv(0, 1)).unwrap(), expected, 1e-12));
        assert!(close(forman_multiplex(cg.graph(), sv(0, 0), sv(0, 1)).unwrap(), expected, 1e-12));

        // W3 <= W1 <= W2
        let (w1, w2, w3) = (2.0, 5.0, 1.0);
        let cg = engineered(&[w1, w2, w3], &[m1, m2, m3]);
        let expected = -m1 * w1 / w3 + m2 * (1.0 - w1 / w2 - w1 / w3);
        assert!(close(forman_inter_compile(&cg, sv(0, 0), sv(0, 1)).unwrap(), expected, 1e-12));
        assert!(close(forman_multiplex(cg.graph(), sv(0, 0), sv(0, 1)).unwrap(), expected, 1e-12));
    }

    #[test]
    fn equal_w_unit_m_gives_minus_two_l_minus_two() {
        for layers in 2..=6 {
            let cg = engineered(&vec![1.5; layers], &vec![1.0; layers]);
            let expected = -2.0 * (layers as f64 - 2.0);
            for e in cg.graph().edges().iter().filter(|e| e.kind() == EdgeKind::Inter) {
                assert_eq!(forman_inter_compile(&cg, e.a, e.b).unwrap(), expected);
                assert!(close(forman_multiplex(cg.graph(), e.a, e.b).unwrap(), expected, 1e-12));
            }
        }
    }

    #[test]
    fn gamma_partition_cases() {
        let p = gamma_partition(&engineered(&[1.0, 2.0], &[1.0; 2]), sv(0, 0), sv(0, 1)).unwrap();
        assert!(p.all.is_empty() && p.minus.is_empty() && p.plus.is_empty());

        let l3 = LayerId::new(3).unwrap();
        let p = gamma_partition(&engineered(&[1.0, 3.0, 2.0], &[1.0; 3]), sv(0, 0), sv(0, 1)).unwrap();
        assert_eq!((p.all, p.minus, p.plus), (vec![l3], vec![], vec![]));

        let p = gamma_partition(&engineered(&[2.0; 3], &[1.0; 3]), sv(0, 1), sv(0, 0)).unwrap();
        assert_eq!((p.all, p.minus, p.plus), (vec![l3], vec![l3], vec![l3]));

        // orientation follows W, not query order
        let p = gamma_partition(&engineered(&[4.0, 1.0], &[1.0; 2]), sv(0, 0), sv(0, 1)).unwrap();
        assert_eq!(p.low, sv(0, 1));
    }

    #[test]
    fn rejects_intra_edges() {
        let cg = engineered(&[1.0, 2.0], &[1.0; 2]);
        assert!(matches!(
            gamma_partition(&cg, sv(0, 0), sv(1, 0)),
            Err(GraphError::NotAnInterEdge(_))
        ));
        assert!(matches!(
            forman_inter_compile(&cg, sv(0, 0), sv(1, 1)),
            Err(GraphError::EdgeNotFound(_))
        ));
    }

    #[test]
    fn intra_edge_decomposes_into_layer_curvature_minus_corrections() {
        let layers = vec![
            crate::generators::erdos_renyi_weighted(10, 0.5, (0.1, 2.0), (1.0, 10.0), 1),
            crate::generators::erdos_renyi_weighted(10, 0.5, (0.1, 2.0), (1.0, 10.0), 2),
            crate::generators::erdos_renyi_weighted(10, 0.5, (0.1, 2.0), (1.0, 10.0), 3),
        ];
        let cg = CompileGraph::compile(&layers).unwrap();
        let g = cg.graph();
        for e in g.edges().iter().filter(|e| e.kind() == EdgeKind::Intra) {
            let layer = e.a.layer.index();
            let local = forman_monolayer(&layers[layer], e.a.vertex, e.b.vertex).unwrap();
            let correction = |x: StateVertex| -> f64 {
                g.vertex_weight(x)
                    * g.inter_neighbors(x).map(|(_, w)| (e.weight / w).sqrt()).sum::<f64>()
            };
            let expected = local - correction(e.a) - correction(e.b);
            let f = forman_multiplex(g, e.a, e.b).unwrap();
            assert!(close(f, expected, 1e-12));
        }
    }

    #[test]
    fn printed_lower_bound_fails_for_middle_layer() {
        // W1 < W3 < W2: Γ = {3}, Γ₋ = ∅, so `lower` = m2(1 - W1/W2) but
        // F = -m1 + m2(1 - W1/W2 - W1/W3).
        let cg = engineered(&[1.0, 4.0, 2.0], &[1.0; 3]);
        let f = forman_inter_compile(&cg, sv(0, 0), sv(0, 1)).unwrap();
        let b = inter_curvature_bounds(&cg, sv(0, 0), sv(0, 1)).unwrap();
        assert!((f - -0.75).abs() < 1e-15);
        assert!((b.lower - 0.75).abs() < 1e-15);
        assert!(f < b.lower);
        assert!(b.lower_corrected <= f && f <= b.upper);
    }

    #[test]
    fn bounds_reach_equality_when_tight() {
        // Γ = Γ₊: every other layer has W above both endpoints
        let cg = engineered(&[1.0, 2.0, 3.0, 7.0], &[0.6, 1.1, 0.9, 0.2]);
        let f = forman_inter_compile(&cg, sv(0, 0), sv(0, 1)).unwrap();
        let b = inter_curvature_bounds(&cg, sv(0, 0), sv(0, 1)).unwrap();
        assert!(b.all_plus);
        assert!(close(f, b.upper, 1e-12));

        // Γ = Γ₋ with equal W among Γ₋
        let cg = engineered(&[2.0, 3.0, 0.5, 0.5], &[0.6, 1.1, 0.9, 0.2]);
        let f = forman_inter_compile(&cg, sv(0, 0), sv(0, 1)).unwrap();
        let b = inter_curvature_bounds(&cg, sv(0, 0), sv(0, 1)).unwrap();
        assert!(b.all_minus);
        assert!(close(f, b.lower, 1e-12));
        assert!(f < b.upper);

        // L = 2: both bounds collapse onto F
        let cg = engineered(&[1.0, 3.0], &[0.5, 2.0]);
        let f = forman_inter_compile(&cg, sv(0, 0), sv(0, 1)).unwrap();
        let b = inter_curvature_bounds(&cg, sv(0, 0), sv(0, 1)).unwrap();
        assert!(close(f, 2.0 * (1.0 - 1.0 / 3.0), 1e-14));
        assert!(close(b.lower, f, 1e-14) && close(b.upper, f, 1e-14));
    }

    #[test]
    fn report_covers_every_edge_once() {
        let layers = vec![complete(4), cycle(4)];
        let cg = CompileGraph::compile(&layers).unwrap();
        let report = compile_curvature_report(&cg);
        assert_eq!(report.entries.len(), cg.graph().edges().len());
        assert_eq!(report.inter.count, 4);
        assert!(report
            .entries
            .iter()
            .filter(|e| e.kind == EdgeKind::Inter)
            .all(|e| e.low_w_layer.is_some()));
    }

    fn arb_profile() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..=5).prop_flat_map(|l| {
            (
                proptest::collection::vec(0.2f64..5.0, l),
                proptest::collection::vec(0.05f64..2.0, l),
            )
        })
    }

    proptest! {
        #[test]
        fn closed_form_matches_general_and_upper_bound_holds((w, m) in arb_profile()) {
            let cg = engineered(&w, &m);
            for e in cg.graph().edges().iter().filter(|e| e.kind() == EdgeKind::Inter) {
                let general = forman_multiplex(cg.graph(), e.a, e.b).unwrap();
                let closed = forman_inter_compile(&cg, e.b, e.a).unwrap();
                prop_assert!(close(general, closed, 1e-9));
                let b = inter_curvature_bounds(&cg, e.a, e.b).unwrap();
                prop_assert!(closed <= b.upper + 1e-9 * b.upper.abs().max(1.0));
                prop_assert!(closed >= b.lower_corrected - 1e-9 * b.lower_corrected.abs().max(1.0));
                if w.len() == 2 {
                    prop_assert!(closed >= 0.0);
                }
            }
        }

        #[test]
        fn curvature_is_symmetric((w, m) in arb_profile()) {
            let cg = engineered(&w, &m);
            for e in cg.graph().edges() {
                prop_assert_eq!(
                    forman_multiplex(cg.graph(), e.a, e.b).unwrap(),
                    forman_multiplex(cg.graph(), e.b, e.a).unwrap()
                );
            }
        }
    }
}
