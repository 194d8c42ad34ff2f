//! The versioned JSON graph format.
//!
//! ```json
//! {
//!   "format": "multiplex-graph",
//!   "version": 1,
//!   "n": 3,
//!   "layer_count": 2,
//!   "layers": [
//!     {"vertex_weights": [1.0, 1.0, 1.0], "edges": [[0, 1, 1.0], [1, 2, 2.5]]},
//!     {"vertex_weights": [0.5, 0.5, 0.5], "edges": [[0, 2, 1.0]]}
//!   ],
//!   "inter_edges": [[0, 1, 2, 1.0]],
//!   "labels": ["a", "b", "c"]
//! }
//! ```
//!
//! Vertices are zero-based. `inter_edges` rows are `[vertex, layer, layer,
//! weight]` with one-based layers. Without `inter_edges` the document is a
//! compile graph and inter-layer edges are derived; with it (even empty) the
//! inter-layer edges are exactly those listed. `labels` is optional.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::graph::{CompileGraph, DoublyWeightedGraph, EdgeKind, InterEdge, MultiplexGraph};

pub const FORMAT_TAG: &str = "multiplex-graph";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {element}: {reason}")]
    Validation { element: String, reason: String },
}

fn invalid(element: impl Into<String>, reason: impl ToString) -> IoError {
    IoError::Validation {
        element: element.into(),
        reason: reason.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format: String,
    version: u32,
    n: usize,
    layer_count: usize,
    layers: Vec<RawLayer>,
    #[serde(default)]
    inter_edges: Option<Vec<(usize, usize, usize, f64)>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    vertex_weights: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DocumentGraph {
    /// Inter-layer edges derived from the layers.
    Compile(CompileGraph),
    /// Inter-layer edges given explicitly.
    Multiplex(MultiplexGraph),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphDocument {
    pub graph: DocumentGraph,
    pub labels: Option<Vec<String>>,
}

impl GraphDocument {
    pub fn compile(cg: CompileGraph) -> Self {
        GraphDocument {
            graph: DocumentGraph::Compile(cg),
            labels: None,
        }
    }

    pub fn multiplex(&self) -> &MultiplexGraph {
        match &self.graph {
            DocumentGraph::Compile(cg) => cg.graph(),
            DocumentGraph::Multiplex(g) => g,
        }
    }

    pub fn as_compile(&self) -> Option<&CompileGraph> {
        match &self.graph {
            DocumentGraph::Compile(cg) => Some(cg),
            DocumentGraph::Multiplex(_) => None,
        }
    }

    pub fn layers(&self) -> Vec<DoublyWeightedGraph> {
        match &self.graph {
            DocumentGraph::Compile(cg) => cg.sources().to_vec(),
            DocumentGraph::Multiplex(g) => (0..g.layer_count())
                .map(|i| g.layer_graph(i).expect("layer index in range"))
                .collect(),
        }
    }

    /// Explicit inter-layer edges; empty for compile graphs.
    pub fn inter_edges(&self) -> Vec<InterEdge> {
        match &self.graph {
            DocumentGraph::Compile(_) => Vec::new(),
            DocumentGraph::Multiplex(g) => g
                .edges()
                .iter()
                .filter(|e| e.kind() == EdgeKind::Inter)
                .map(|e| InterEdge {
                    vertex: e.a.vertex,
                    layer_a: e.a.layer.index(),
                    layer_b: e.b.layer.index(),
                    weight: e.weight,
                })
                .collect(),
        }
    }
}

fn check_weight(value: f64, element: impl FnOnce() -> String) -> Result<(), IoError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(element(), format!("weight {value} must be positive and finite")))
    }
}

pub fn parse_graph(text: &str) -> Result<GraphDocument, IoError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.format != FORMAT_TAG {
        return Err(invalid("format", format!("expected {FORMAT_TAG:?}, found {:?}", raw.format)));
    }
    if raw.version != FORMAT_VERSION {
        return Err(invalid("version", format!("unsupported version {}", raw.version)));
    }
    if raw.layers.len() != raw.layer_count {
        return Err(invalid(
            "layers",
            format!("layer_count is {} but {} layers are listed", raw.layer_count, raw.layers.len()),
        ));
    }
    if raw.layers.is_empty() {
        return Err(invalid("layers", "at least one layer is required"));
    }
    let n = raw.n;
    if let Some(labels) = &raw.labels {
        if labels.len() != n {
            return Err(invalid("labels", format!("{} labels for {n} vertices", labels.len())));
        }
    }

    let mut layers = Vec::with_capacity(raw.layers.len());
    for (i, layer) in raw.layers.iter().enumerate() {
        if layer.vertex_weights.len() != n {
            return Err(invalid(
                format!("layers[{i}].vertex_weights"),
                format!("{} weights for {n} vertices", layer.vertex_weights.len()),
            ));
        }
        for (x, &m) in layer.vertex_weights.iter().enumerate() {
            check_weight(m, || format!("layers[{i}].vertex_weights[{x}] (vertex {x} in layer {})", i + 1))?;
        }
        for (k, &(u, v, w)) in layer.edges.iter().enumerate() {
            check_weight(w, || format!("layers[{i}].edges[{k}] (edge ({u}, {v}) in layer {})", i + 1))?;
        }
        let pairs: Vec<_> = layer.edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let w: Vec<_> = layer.edges.iter().map(|&(_, _, w)| w).collect();
        layers.push(
            DoublyWeightedGraph::new(n, &pairs, &layer.vertex_weights, &w)
                .map_err(|e| invalid(format!("layers[{i}]"), e))?,
        );
    }

    let graph = match raw.inter_edges {
        None => DocumentGraph::Compile(CompileGraph::compile(&layers).map_err(|e| invalid("layers", e))?),
        Some(rows) => {
            let mut inter = Vec::with_capacity(rows.len());
            for (k, &(vertex, la, lb, weight)) in rows.iter().enumerate() {
                let element = || format!("inter_edges[{k}] (vertex {vertex}, layers {la}-{lb})");
                for l in [la, lb] {
                    if l == 0 || l > raw.layer_count {
                        return Err(invalid(element(), format!("layer {l} outside 1..={}", raw.layer_count)));
                    }
                }
                check_weight(weight, element)?;
                inter.push(InterEdge {
                    vertex,
                    layer_a: la - 1,
                    layer_b: lb - 1,
                    weight,
                });
            }
            let m: Vec<Vec<f64>> = layers.iter().map(|g| g.vertex_weights().to_vec()).collect();
            let intra: Vec<Vec<_>> = layers
                .iter()
                .map(|g| g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect())
                .collect();
            DocumentGraph::Multiplex(MultiplexGraph::new(n, &m, &intra, &inter).map_err(|e| invalid("inter_edges", e))?)
        }
    };
    Ok(GraphDocument {
        graph,
        labels: raw.labels,
    })
}

fn json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// Canonical text: edges sorted, one edge per line.
pub fn serialize_graph(doc: &GraphDocument) -> String {
    let layers = doc.layers();
    let n = doc.multiplex().vertex_count();
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"format\": {},", json(FORMAT_TAG));
    let _ = writeln!(out, "  \"version\": {FORMAT_VERSION},");
    let _ = writeln!(out, "  \"n\": {n},");
    let _ = writeln!(out, "  \"layer_count\": {},", layers.len());
    let _ = writeln!(out, "  \"layers\": [");
    for (i, g) in layers.iter().enumerate() {
        let _ = writeln!(out, "    {{");
        let _ = writeln!(out, "      \"vertex_weights\": {},", json(g.vertex_weights()));
        let edges: Vec<String> = g
            .edges()
            .iter()
            .map(|e| format!("        {}", json(&(e.u, e.v, e.weight))))
            .collect();
        if edges.is_empty() {
            let _ = writeln!(out, "      \"edges\": []");
        } else {
            let _ = writeln!(out, "      \"edges\": [\n{}\n      ]", edges.join(",\n"));
        }
        let _ = writeln!(out, "    }}{}", if i + 1 < layers.len() { "," } else { "" });
    }
    let _ = write!(out, "  ]");
    if let DocumentGraph::Multiplex(_) = doc.graph {
        let rows: Vec<String> = doc
            .inter_edges()
            .iter()
            .map(|e| format!("    {}", json(&(e.vertex, e.layer_a + 1, e.layer_b + 1, e.weight))))
            .collect();
        if rows.is_empty() {
            let _ = write!(out, ",\n  \"inter_edges\": []");
        } else {
            let _ = write!(out, ",\n  \"inter_edges\": [\n{}\n  ]", rows.join(",\n"));
        }
    }
    if let Some(labels) = &doc.labels {
        let _ = write!(out, ",\n  \"labels\": {}", json(labels));
    }
    out.push_str("\n}\n");
    out
}

pub fn read_graph(path: &Path) -> Result<GraphDocument, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_graph(&text)
}

pub fn write_graph(path: &Path, doc: &GraphDocument) -> Result<(), IoError> {
    std::fs::write(path, serialize_graph(doc)).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
