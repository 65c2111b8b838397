//! Canonical network JSON.
//!
//! Keys are sorted, percentages are strings with four decimals. Parsing
//! recomputes percentages from counts and rejects documents whose strings
//! disagree, so a parsed network equals the one that was written.

use pathlens_core::pathflow::{edge_percentage, FlowEdge, FlowNetwork, FlowNode, Granularity, NodeId, NodeIdError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

// Field order is alphabetical so serde writes sorted keys.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    edges: Vec<EdgeDoc>,
    granularity: Granularity,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    access_count: u64,
    id: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    count: u64,
    dst: String,
    pct: String,
    src: String,
}

#[derive(Debug, Error)]
pub enum NetworkJsonError {
    #[error("malformed network document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Node(#[from] NodeIdError),
    #[error("edge {src} -> {dst} refers to a missing node")]
    DanglingEdge { src: String, dst: String },
    #[error("edge {src} -> {dst}: pct {found:?} does not match counts ({expected})")]
    Percentage {
        src: String,
        dst: String,
        found: String,
        expected: String,
    },
    #[error("nodes or edges are not sorted and unique")]
    Unsorted,
}

pub fn format_pct(p: f64) -> String {
    format!("{p:.4}")
}

pub fn network_to_json(network: &FlowNetwork) -> String {
    let doc = NetworkDoc {
        edges: network
            .edges
            .iter()
            .map(|e| EdgeDoc {
                count: e.learner_count,
                dst: e.dst.to_string(),
                pct: format_pct(e.percentage),
                src: e.src.to_string(),
            })
            .collect(),
        granularity: network.granularity,
        nodes: network
            .nodes
            .iter()
            .map(|n| NodeDoc {
                access_count: n.access_count,
                id: n.id.to_string(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("network document serializes");
    text.push('\n');
    text
}

pub fn network_from_json(text: &str) -> Result<FlowNetwork, NetworkJsonError> {
    let doc: NetworkDoc = serde_json::from_str(text)?;
    let nodes = doc
        .nodes
        .iter()
        .map(|n| {
            Ok(FlowNode {
                id: n.id.parse()?,
                access_count: n.access_count,
            })
        })
        .collect::<Result<Vec<_>, NetworkJsonError>>()?;
    if nodes.windows(2).any(|w| w[0].id >= w[1].id) {
        return Err(NetworkJsonError::Unsorted);
    }
    let network = FlowNetwork {
        granularity: doc.granularity,
        nodes,
        edges: Vec::new(),
    };
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        let src: NodeId = e.src.parse()?;
        let dst: NodeId = e.dst.parse()?;
        let (Some(src_node), Some(_)) = (network.node(src), network.node(dst)) else {
            return Err(NetworkJsonError::DanglingEdge {
                src: e.src.clone(),
                dst: e.dst.clone(),
            });
        };
        let percentage = edge_percentage(e.count, src_node.access_count);
        let expected = format_pct(percentage);
        if expected != e.pct {
            return Err(NetworkJsonError::Percentage {
                src: e.src.clone(),
                dst: e.dst.clone(),
                found: e.pct.clone(),
                expected,
            });
        }
        edges.push(FlowEdge {
            src,
            dst,
            learner_count: e.count,
            percentage,
        });
    }
    if edges.windows(2).any(|w| (w[0].src, w[0].dst) >= (w[1].src, w[1].dst)) {
        return Err(NetworkJsonError::Unsorted);
    }
    Ok(FlowNetwork { edges, ..network })
}
