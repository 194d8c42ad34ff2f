//! First-order sensitivity of monolayer Forman curvature to vertex and edge
//! weights, and the dimensionless sensitivity `S_p = ∂F/∂p · p / F`.
//!
//! The curvature sums include the differentiated edge `e` itself, whose term
//! `√(w(e)/w(e)) = 1` is constant. The analytic partials below therefore sum
//! over the edges incident to each endpoint *other than* `e`:
//!
//! * `∂F/∂m(x) = 1 - Σ_{z≠y} √(w(e)/w(x,z))`
//! * `∂F/∂w(e) = -1/(2√w(e)) · (Σ_{z≠y} m(x)/√w(x,z) + Σ_{z≠x} m(y)/√w(y,z))`
//! * `∂F/∂w(f) = m(x)√w(e) / (2 w(f)^{3/2})` for `f ≠ e` touching `x`
//!   (symmetrically for `y`), 0 for edges away from `e`.
//!
//! [`finite_difference`] evaluates the same derivatives numerically from the
//! curvature alone and serves as the independent check.

use rand::Rng;
use serde::Serialize;

use crate::curvature::{forman_monolayer, monolayer_curvatures};
use crate::error::{GraphError, Result};
use crate::generators::rng_from_seed;
use crate::graph::DoublyWeightedGraph;
use crate::stats::spearman;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", content = "key", rename_all = "snake_case")]
pub enum Parameter {
    VertexWeight(usize),
    EdgeWeight(usize, usize),
}

impl std::fmt::Display for Parameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parameter::VertexWeight(v) => write!(f, "m({v})"),
            Parameter::EdgeWeight(a, b) => write!(f, "w({a},{b})"),
        }
    }
}

/// `S_p`, or an explicit marker when `F(e) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sensitivity {
    Defined(f64),
    Undefined,
}

impl Sensitivity {
    pub fn value(self) -> Option<f64> {
        match self {
            Sensitivity::Defined(v) => Some(v),
            Sensitivity::Undefined => None,
        }
    }
}

/// `Σ √(w(e)/w(x,z))` over edges at `x` other than `e`.
fn ratio_sum_excluding(g: &DoublyWeightedGraph, e: usize, x: usize) -> f64 {
    let we = g.edge(e).weight;
    g.incident(x)
        .iter()
        .filter(|inc| inc.edge != e)
        .map(|inc| (we / g.edge(inc.edge).weight).sqrt())
        .sum()
}

pub fn partial_wrt_vertex_weight(g: &DoublyWeightedGraph, edge: (usize, usize), v: usize) -> Result<f64> {
    let e = g.require_edge(edge.0, edge.1)?;
    if !g.edge(e).touches(v) {
        return Err(GraphError::VertexNotOnEdge {
            vertex: v,
            a: edge.0,
            b: edge.1,
        });
    }
    Ok(1.0 - ratio_sum_excluding(g, e, v))
}

pub fn partial_wrt_own_edge_weight(g: &DoublyWeightedGraph, edge: (usize, usize)) -> Result<f64> {
    let e = g.require_edge(edge.0, edge.1)?;
    let this = *g.edge(e);
    let side = |x: usize| -> f64 {
        g.vertex_weight(x)
            * g.incident(x)
                .iter()
                .filter(|inc| inc.edge != e)
                .map(|inc| g.edge(inc.edge).weight.sqrt().recip())
                .sum::<f64>()
    };
    Ok(-(side(this.u) + side(this.v)) / (2.0 * this.weight.sqrt()))
}

pub fn partial_wrt_other_edge_weight(
    g: &DoublyWeightedGraph,
    edge: (usize, usize),
    other: (usize, usize),
) -> Result<f64> {
    let e = g.require_edge(edge.0, edge.1)?;
    let f = g.require_edge(other.0, other.1)?;
    if e == f {
        return Err(GraphError::SameEdge(edge.0, edge.1));
    }
    let (this, that) = (g.edge(e), g.edge(f));
    let shared = [this.u, this.v].into_iter().find(|&x| that.touches(x));
    Ok(match shared {
        Some(x) => g.vertex_weight(x) * this.weight.sqrt() / (2.0 * that.weight.powf(1.5)),
        None => 0.0,
    })
}

pub fn partial(g: &DoublyWeightedGraph, edge: (usize, usize), p: Parameter) -> Result<f64> {
    match p {
        Parameter::VertexWeight(v) => partial_wrt_vertex_weight(g, edge, v),
        Parameter::EdgeWeight(a, b) => {
            if g.require_edge(a, b)? == g.require_edge(edge.0, edge.1)? {
                partial_wrt_own_edge_weight(g, edge)
            } else {
                partial_wrt_other_edge_weight(g, edge, (a, b))
            }
        }
    }
}

fn parameter_value(g: &DoublyWeightedGraph, p: Parameter) -> Result<f64> {
    match p {
        Parameter::VertexWeight(v) => {
            if v >= g.vertex_count() {
                return Err(GraphError::IndexOutOfRange {
                    vertex: v,
                    n: g.vertex_count(),
                });
            }
            Ok(g.vertex_weight(v))
        }
        Parameter::EdgeWeight(a, b) => Ok(g.edge(g.require_edge(a, b)?).weight),
    }
}

fn with_parameter(g: &DoublyWeightedGraph, p: Parameter, value: f64) -> Result<DoublyWeightedGraph> {
    match p {
        Parameter::VertexWeight(v) => {
            let mut m = g.vertex_weights().to_vec();
            m[v] = value;
            g.with_vertex_weights(&m)
        }
        Parameter::EdgeWeight(a, b) => {
            let mut w = g.edge_weights();
            w[g.require_edge(a, b)?] = value;
            g.with_edge_weights(&w)
        }
    }
}

/// Relative step of the central difference.
pub const FD_RELATIVE_STEP: f64 = 1e-6;
/// Absolute floor of the central-difference step.
pub const FD_ABSOLUTE_STEP: f64 = 1e-9;

/// Central finite difference of `F(edge)` in parameter `p`, computed by
/// re-evaluating the curvature on perturbed copies of the graph.
pub fn finite_difference(g: &DoublyWeightedGraph, edge: (usize, usize), p: Parameter) -> Result<f64> {
    let value = parameter_value(g, p)?;
    let h = (FD_RELATIVE_STEP * value.abs()).max(FD_ABSOLUTE_STEP);
    let up = forman_monolayer(&with_parameter(g, p, value + h)?, edge.0, edge.1)?;
    let down = forman_monolayer(&with_parameter(g, p, value - h)?, edge.0, edge.1)?;
    Ok((up - down) / (2.0 * h))
}

pub fn dimensionless_sensitivity(
    g: &DoublyWeightedGraph,
    edge: (usize, usize),
    p: Parameter,
) -> Result<Sensitivity> {
    let curvature = forman_monolayer(g, edge.0, edge.1)?;
    let d = partial(g, edge, p)?;
    let value = parameter_value(g, p)?;
    Ok(if curvature == 0.0 {
        Sensitivity::Undefined
    } else {
        Sensitivity::Defined(d * value / curvature)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityRecord {
    pub edge: (usize, usize),
    pub parameter: Parameter,
    pub curvature: f64,
    pub partial: f64,
    pub dimensionless: Sensitivity,
}

/// Every `(edge, parameter)` pair the curvature depends on: both endpoint
/// vertex weights, the edge's own weight and each adjacent edge weight.
/// Ordered by edge key, then vertex parameters before edge parameters.
pub fn sensitivity_map(g: &DoublyWeightedGraph) -> Vec<SensitivityRecord> {
    let curvatures = monolayer_curvatures(g);
    let mut out = Vec::new();
    for (idx, e) in g.edges().iter().enumerate() {
        let mut params = vec![Parameter::VertexWeight(e.u), Parameter::VertexWeight(e.v)];
        let mut edge_params: Vec<(usize, usize)> = g
            .incident(e.u)
            .iter()
            .chain(g.incident(e.v))
            .map(|inc| g.edge(inc.edge).key())
            .collect();
        edge_params.sort_unstable();
        edge_params.dedup();
        params.extend(edge_params.into_iter().map(|(a, b)| Parameter::EdgeWeight(a, b)));

        let curvature = curvatures[idx];
        for p in params {
            let d = partial(g, e.key(), p).expect("parameters are drawn from the graph");
            let value = parameter_value(g, p).expect("parameters are drawn from the graph");
            out.push(SensitivityRecord {
                edge: e.key(),
                parameter: p,
                curvature,
                partial: d,
                dimensionless: if curvature == 0.0 {
                    Sensitivity::Undefined
                } else {
                    Sensitivity::Defined(d * value / curvature)
                },
            });
        }
    }
    out
}

/// How much per-edge curvature moves under bounded random re-weighting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub factor_range: (f64, f64),
    pub spearman: f64,
    pub sign_changes: usize,
    pub max_abs_change: f64,
    pub threshold: f64,
    pub stable: bool,
}

/// Multiplies every vertex and edge weight by an independent factor drawn
/// from `factor_range` and compares per-edge curvature before and after.
pub fn stability_summary(
    g: &DoublyWeightedGraph,
    factor_range: (f64, f64),
    threshold: f64,
    seed: u64,
) -> Result<StabilityReport> {
    let mut rng = rng_from_seed(seed);
    let mut factor = || rng.random_range(factor_range.0..=factor_range.1);
    let m: Vec<f64> = g.vertex_weights().iter().map(|m| m * factor()).collect();
    let w: Vec<f64> = g.edge_weights().iter().map(|w| w * factor()).collect();
    let perturbed = g.with_vertex_weights(&m)?.with_edge_weights(&w)?;
    let before = monolayer_curvatures(g);
    let after = monolayer_curvatures(&perturbed);
    let rho = spearman(&before, &after);
    Ok(StabilityReport {
        factor_range,
        spearman: rho,
        sign_changes: before
            .iter()
            .zip(&after)
            .filter(|(a, b)| a.signum() != b.signum())
            .count(),
        max_abs_change: before
            .iter()
            .zip(&after)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
        threshold,
        stable: rho > threshold,
    })
}
