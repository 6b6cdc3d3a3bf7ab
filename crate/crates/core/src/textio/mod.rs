//! The `.dsk` text format: documents, canonical output and DOT export.

mod dot;
mod lexer;
mod parser;
mod writer;

use std::collections::BTreeMap;

use crate::delta::Delta;
use crate::intangible::IntangibleSpec;
use crate::model::{BaseConcept, ConceptName};
use crate::pattern::OntologyGraph;
use crate::product_line::VariantSet;
use crate::registry::{builtin_corpus, Registry};

pub use dot::{graph_to_dot, ontology_to_dot};
pub use parser::{parse, parse_bytes, ParseError, ParseErrorKind};
pub use writer::{serialize, serialize_document};

/// First line of everything the writer emits.
pub const FORMAT_HEADER: &str = "# dsocket-dsl v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonConceptDef {
    pub name: ConceptName,
    pub delta: Delta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductLineDef {
    pub name: ConceptName,
    pub set: VariantSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDef {
    pub name: ConceptName,
    pub graph: OntologyGraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Concept(BaseConcept),
    NonConcept(NonConceptDef),
    Intangible(IntangibleSpec),
    ProductLine(ProductLineDef),
    Graph(GraphDef),
}

impl Item {
    pub fn name(&self) -> &ConceptName {
        match self {
            Item::Concept(c) => c.name(),
            Item::NonConcept(d) => &d.name,
            Item::Intangible(s) => &s.term,
            Item::ProductLine(p) => &p.name,
            Item::Graph(g) => &g.name,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Item::Concept(_) => "concept",
            Item::NonConcept(_) => "nonconcept",
            Item::Intangible(_) => "intangible",
            Item::ProductLine(_) => "productline",
            Item::Graph(_) => "graph",
        }
    }
}

/// A parsed `.dsk` file. Names are unique per item kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub items: Vec<Item>,
}

impl Document {
    pub fn new(items: Vec<Item>) -> Self {
        Document { items }
    }

    pub fn concepts(&self) -> impl Iterator<Item = &BaseConcept> {
        self.items.iter().filter_map(|i| match i {
            Item::Concept(c) => Some(c),
            _ => None,
        })
    }

    pub fn concept(&self, name: &str) -> Option<&BaseConcept> {
        self.concepts().find(|c| c.name().as_str() == name)
    }

    pub fn nonconcept(&self, name: &str) -> Option<&NonConceptDef> {
        self.items.iter().find_map(|i| match i {
            Item::NonConcept(d) if d.name.as_str() == name => Some(d),
            _ => None,
        })
    }

    pub fn intangible(&self, name: &str) -> Option<&IntangibleSpec> {
        self.items.iter().find_map(|i| match i {
            Item::Intangible(s) if s.term.as_str() == name => Some(s),
            _ => None,
        })
    }

    pub fn productline(&self, name: &str) -> Option<&ProductLineDef> {
        self.items.iter().find_map(|i| match i {
            Item::ProductLine(p) if p.name.as_str() == name => Some(p),
            _ => None,
        })
    }

    pub fn graph(&self, name: &str) -> Option<&GraphDef> {
        self.items.iter().find_map(|i| match i {
            Item::Graph(g) if g.name.as_str() == name => Some(g),
            _ => None,
        })
    }

    /// The built-in corpus with this document's concepts layered on top.
    /// A document concept replaces a built-in one of the same name.
    pub fn registry(&self) -> Registry {
        self.concepts().fold(builtin_corpus(), |registry, concept| {
            registry
                .register(concept.clone(), true)
                .expect("override never collides")
        })
    }

    /// A document holding every concept of `registry`, ordered by name.
    pub fn from_registry(registry: &Registry) -> Self {
        Document::new(registry.concepts().cloned().map(Item::Concept).collect())
    }

    /// Items grouped by kind keyword, for listing.
    pub fn names_by_kind(&self) -> BTreeMap<&'static str, Vec<&ConceptName>> {
        let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for item in &self.items {
            out.entry(item.keyword()).or_default().push(item.name());
        }
        out
    }
}
