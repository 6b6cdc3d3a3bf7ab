//! Graphviz DOT export.

use std::fmt::Write;

use crate::model::PluggableOntology;
use crate::pattern::{to_graph, EdgeKind, NodeKind, OntologyGraph};

fn quote(text: &str) -> String {
    let mut out = String::from("\"");
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

/// Renders a graph as a DOT digraph: one box per node in graph order,
/// composition edges drawn with an open diamond at the whole, plugged-in
/// edges labeled with their cardinality. pos/neg classes are labeled `pos`
/// and `neg` with the quality text as an external label.
pub fn graph_to_dot(name: &str, graph: &OntologyGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    out.push_str("  node [shape=box];\n");
    for node in graph.nodes() {
        let attrs = match node.kind {
            NodeKind::PosClass | NodeKind::NegClass => format!(
                "label={}, xlabel={}",
                quote(node.kind.keyword()),
                quote(node.display_label())
            ),
            _ => format!("label={}", quote(node.display_label())),
        };
        writeln!(out, "  {} [{attrs}];", quote(&node.id)).unwrap();
    }
    for edge in graph.edges() {
        let attrs = match edge.kind {
            EdgeKind::Composition => "dir=back, arrowtail=odiamond".to_string(),
            EdgeKind::PluggedIn(c) => format!("label={}", quote(&format!("plugged-in ({c})"))),
        };
        writeln!(out, "  {} -> {} [{attrs}];", quote(&edge.from), quote(&edge.to)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// DOT for a derived ontology, named after its root.
pub fn ontology_to_dot(ontology: &PluggableOntology) -> String {
    graph_to_dot(ontology.root().as_str(), &to_graph(ontology))
}
