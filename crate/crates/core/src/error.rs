use thiserror::Error;

/// Errors raised while building or querying graphs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    IndexOutOfRange { vertex: usize, n: usize },
    #[error("layer {layer} out of range for graph with {layers} layers")]
    LayerOutOfRange { layer: usize, layers: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("non-positive or non-finite weight {value} on {element}")]
    NonPositiveWeight { element: String, value: f64 },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("edge {0} not found")]
    EdgeNotFound(String),
    #[error("layers have different vertex counts ({0} vs {1})")]
    MismatchedVertexCounts(usize, usize),
    #[error("empty layer list")]
    EmptyLayerList,
    #[error("inter-layer edge must join copies of one vertex in distinct layers: {0}")]
    InvalidInterEdge(String),
    #[error("edge {0} is not an inter-layer edge")]
    NotAnInterEdge(String),
    #[error("vertex {vertex} is not an endpoint of edge ({a}, {b})")]
    VertexNotOnEdge { vertex: usize, a: usize, b: usize },
    #[error("parameter edge coincides with the differentiated edge ({0}, {1})")]
    SameEdge(usize, usize),
    #[error("graph has no edges")]
    NoEdges,
    #[error("invalid normalization range ({lo}, {hi})")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("at least {required} layers required, graph has {actual}")]
    TooFewLayers { required: usize, actual: usize },
    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;
