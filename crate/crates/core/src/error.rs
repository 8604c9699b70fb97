use thiserror::Error;

use crate::graph::{LinkId, NodeId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("link {link} is a self-loop on node {node}")]
    SelfLoop { link: LinkId, node: NodeId },

    #[error("link {link} has endpoint {node} but the graph has only {node_count} nodes")]
    EndpointOutOfRange {
        link: LinkId,
        node: NodeId,
        node_count: usize,
    },

    #[error("unknown link {0}")]
    UnknownLink(LinkId),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("graph is disconnected: nodes {a} and {b} lie in different components")]
    Disconnected { a: NodeId, b: NodeId },

    #[error("invalid conflict weight W({from},{to}) = {weight}")]
    InvalidWeight { from: LinkId, to: LinkId, weight: f64 },

    #[error("set is not semi-feasible: link {link} exchanges {total} with earlier links (limit 1/2)")]
    NotSemiFeasible { link: LinkId, total: f64 },

    #[error("{what} has size {size}, above the cap of {cap}; sample a smaller instance or raise the cap")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("conflict graph must be 0/1 valued and symmetric, but W({from},{to}) = {weight}")]
    NotUnweighted { from: LinkId, to: LinkId, weight: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("link {link} cannot succeed even alone: beta*noise = {required} >= signal {signal}")]
    NoiseTooHigh {
        link: LinkId,
        required: f64,
        signal: f64,
    },

    #[error("link {0} has no geometry")]
    MissingGeometry(LinkId),

    #[error(
        "grid schedule gave up after {attempts} attempts (separation {separation}): \
         slot {slot:?} has in-affectance {max_sum} at link {link}"
    )]
    GridRetriesExhausted {
        attempts: usize,
        separation: f64,
        slot: Vec<LinkId>,
        link: LinkId,
        max_sum: f64,
    },

    #[error("terminals {a} and {b} are not connected in the link graph")]
    TerminalsDisconnected { a: NodeId, b: NodeId },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
