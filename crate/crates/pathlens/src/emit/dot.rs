use std::collections::BTreeMap;
use std::fmt::Write;

use pathlens_core::pathflow::{FlowNetwork, NodeId};
use pathlens_core::Theme;

use super::style::RenderStyle;

const UNTHEMED: &str = "#ffffff";

/// Graphviz digraph for `network`. Nodes are coloured by `themes` and sized
/// so that area is proportional to the learner count; edges are as thick as
/// their percentage. Statements come in node-id, then edge-id order.
pub fn emit_dot(network: &FlowNetwork, themes: &BTreeMap<NodeId, Theme>, style: &RenderStyle) -> String {
    let mut out = String::new();
    out.push_str("digraph flow {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle, style=filled, fixedsize=true, fontsize=10];\n");
    out.push_str("  edge [arrowsize=0.5, fontsize=8];\n");
    for node in &network.nodes {
        let color = themes
            .get(&node.id)
            .map_or(UNTHEMED, |t| style.palette.get(*t).as_str());
        let width = style.node_scale * (node.access_count as f64).sqrt();
        let label = if style.node_labels {
            format!("{}\\n{}", node.id, node.access_count)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{label}\", fillcolor=\"{color}\", width={width:.4}];",
            node.id
        );
    }
    for edge in &network.edges {
        let pen = style.edge_scale * edge.percentage;
        let label = if style.edge_labels {
            format!("{:.2}%", edge.percentage)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{label}\", penwidth={pen:.4}];",
            edge.src, edge.dst
        );
    }
    out.push_str("}\n");
    out
}
