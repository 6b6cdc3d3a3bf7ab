//! Pluggable nano-ontologies for Non-concepts.
//!
//! A Non-concept keeps the identity of an original concept while some of
//! its parts, functionalities or properties are removed or added. The engine
//! describes such a change as a [`delta::Delta`] over a [`model::BaseConcept`]
//! and derives a small [`model::PluggableOntology`]: the root concept, one
//! Socket holding the changed members with boolean cardinality, and one
//! iSocket holding identities, `Non-` among them.
//!
//! Around that core sit intangible Non-concepts described by pos/neg
//! qualities ([`intangible`]), DSocket pattern validation and detection on
//! general graphs ([`pattern`]), product-line expansion ([`product_line`])
//! and a text DSL with canonical output and DOT export ([`textio`]).

pub mod delta;
pub mod intangible;
pub mod model;
pub mod pattern;
pub mod product_line;
pub mod registry;
pub mod textio;

pub use delta::{apply, classify, derive, diff, Classification, Delta, MemberState, ModOp};
pub use intangible::{build_intangible, intangible_variants, IntangibleSpec};
pub use model::{
    BaseConcept, Cardinality, ConceptName, ISocket, IdentityLabel, MemberKind, PluggableOntology, PluggedEntry, Socket,
};
pub use pattern::{detect, validate, OntologyGraph, PatternInstance, ValidationReport};
pub use registry::{builtin_corpus, Registry};
