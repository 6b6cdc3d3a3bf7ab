//! Canonical text output. Two-space indentation, LF line endings and a
//! trailing newline; equal values always give identical bytes.

use std::fmt::Write;

use super::{Document, Item, FORMAT_HEADER};
use crate::delta::ModOp;
use crate::model::{BaseConcept, IdentityLabel, PlugItem, PluggableOntology, NON_TOKEN};
use crate::pattern::{EdgeKind, OntologyGraph};

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn plug_item(item: &PlugItem) -> String {
    match item {
        PlugItem::Member(name) => name.to_string(),
        PlugItem::Quality(text) => quote(text),
    }
}

fn identity(label: &IdentityLabel) -> String {
    match label {
        IdentityLabel::Non => NON_TOKEN.to_string(),
        other => other.to_string(),
    }
}

/// Canonical form of a pluggable ontology.
///
/// ```text
/// # dsocket-dsl v1
/// pluggable Clock
/// socket {
///   part Battery = 0
///   functionality Periodicity = 0
/// }
/// isocket {
///   Non-
/// }
/// ```
///
/// Socket entries are sorted by kind (part, functionality, property) and
/// then by name; the socket block is left out when empty. Identities keep
/// their order with `Non-` first. Intangible ontologies end with their
/// `pos` and `neg` lines.
pub fn serialize(ontology: &PluggableOntology) -> String {
    let mut out = String::new();
    writeln!(out, "{FORMAT_HEADER}").unwrap();
    writeln!(out, "pluggable {}", ontology.root()).unwrap();
    if !ontology.socket().is_empty() {
        out.push_str("socket {\n");
        for entry in ontology.socket().sorted() {
            writeln!(
                out,
                "  {} {} = {}",
                entry.kind,
                plug_item(&entry.item),
                entry.cardinality
            )
            .unwrap();
        }
        out.push_str("}\n");
    }
    out.push_str("isocket {\n");
    for label in ontology.isocket().canonical() {
        writeln!(out, "  {}", identity(label)).unwrap();
    }
    out.push_str("}\n");
    if let (Some(pos), Some(neg)) = (ontology.pos(), ontology.neg()) {
        writeln!(out, "pos {}", quote(pos.as_str())).unwrap();
        writeln!(out, "neg {}", quote(neg.as_str())).unwrap();
    }
    out
}

/// Writes a document back out in `.dsk` syntax. Items keep their order and
/// are separated by blank lines.
pub fn serialize_document(document: &Document) -> String {
    let mut out = String::new();
    writeln!(out, "{FORMAT_HEADER}").unwrap();
    for (i, item) in document.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Concept(concept) => write_concept(&mut out, concept),
            Item::NonConcept(def) => {
                writeln!(out, "nonconcept {} from {} {{", def.name, def.delta.base).unwrap();
                write_mods(&mut out, &def.delta.ops, "  ");
                out.push_str("}\n");
            }
            Item::Intangible(spec) => {
                writeln!(out, "intangible {} {{", spec.term).unwrap();
                writeln!(out, "  pos {}", quote(spec.pos.as_str())).unwrap();
                writeln!(out, "  neg {}", quote(spec.neg.as_str())).unwrap();
                out.push_str("}\n");
            }
            Item::ProductLine(def) => {
                writeln!(out, "productline {} from {} {{", def.name, def.set.base()).unwrap();
                for variant in def.set.variants() {
                    writeln!(out, "  variant {} stage {} {{", variant.name, variant.stage).unwrap();
                    write_mods(&mut out, &variant.delta.ops, "    ");
                    out.push_str("  }\n");
                }
                out.push_str("}\n");
            }
            Item::Graph(def) => {
                writeln!(out, "graph {} {{", def.name).unwrap();
                write_graph(&mut out, &def.graph);
                out.push_str("}\n");
            }
        }
    }
    out
}

fn write_concept(out: &mut String, concept: &BaseConcept) {
    writeln!(out, "concept {} {{", concept.name()).unwrap();
    for part in concept.parts() {
        let flag = if part.essential { " essential" } else { "" };
        writeln!(out, "  part {}{flag}", part.name).unwrap();
    }
    for functionality in concept.functionalities() {
        write!(out, "  functionality {}", functionality.name).unwrap();
        if !functionality.requires.is_empty() {
            let requires: Vec<&str> = functionality.requires.iter().map(|r| r.as_str()).collect();
            write!(out, " requires {}", requires.join(", ")).unwrap();
        }
        out.push('\n');
    }
    for property in concept.properties() {
        writeln!(out, "  property {}", property.name).unwrap();
    }
    out.push_str("}\n");
}

fn write_mods(out: &mut String, ops: &[ModOp], indent: &str) {
    for op in ops {
        let line = match op {
            ModOp::Remove(kind, name) => format!("remove {kind} {name}"),
            ModOp::Add(kind, name) => format!("add {kind} {name}"),
            ModOp::Restore(kind, name) => format!("restore {kind} {name}"),
            ModOp::SetIdentity(label) => format!("identity {}", identity(label)),
        };
        writeln!(out, "{indent}{line}").unwrap();
    }
}

fn write_graph(out: &mut String, graph: &OntologyGraph) {
    for node in graph.nodes() {
        write!(out, "  node {} : {}", node.id, node.kind.keyword()).unwrap();
        if let Some(label) = &node.label {
            write!(out, " label {}", quote(label)).unwrap();
        }
        out.push('\n');
    }
    for edge in graph.edges() {
        let kind = match edge.kind {
            EdgeKind::Composition => "composition".to_string(),
            EdgeKind::PluggedIn(c) => format!("plugged {c}"),
        };
        writeln!(out, "  edge {} -> {} : {kind}", edge.from, edge.to).unwrap();
    }
}
