//! Intangible Non-concepts: a term characterized by one positive and one
//! negative quality instead of removed or added parts.

use thiserror::Error;

use crate::model::{
    AttributeKind, Cardinality, ConceptName, ISocket, MemberKind, ModelError, NegAttribute, PlugItem,
    PluggableOntology, PluggedEntry, PosAttribute, Socket,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntangibleError {
    #[error("{0} attribute is empty")]
    EmptyAttribute(AttributeKind),
    #[error("pos and neg attributes are both {0:?}")]
    IdenticalAttributes(String),
    #[error("no (pos, neg) pairs given")]
    EmptyList,
}

impl From<ModelError> for IntangibleError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::EmptyAttribute(kind) => IntangibleError::EmptyAttribute(kind),
            other => unreachable!("unexpected model error for an intangible: {other}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntangibleSpec {
    pub term: ConceptName,
    pub pos: PosAttribute,
    pub neg: NegAttribute,
}

impl IntangibleSpec {
    pub fn new(term: ConceptName, pos: impl Into<String>, neg: impl Into<String>) -> Result<Self, IntangibleError> {
        let pos = PosAttribute::new(pos)?;
        let neg = NegAttribute::new(neg)?;
        if pos.as_str() == neg.as_str() {
            return Err(IntangibleError::IdenticalAttributes(pos.as_str().to_string()));
        }
        Ok(IntangibleSpec { term, pos, neg })
    }
}

/// Both qualities are plugged into the socket with cardinality 1 and the
/// isocket holds only `Non-`.
pub fn build_intangible(spec: &IntangibleSpec) -> PluggableOntology {
    let socket = Socket::new()
        .insert(PluggedEntry::new(
            PlugItem::Quality(spec.pos.as_str().to_string()),
            MemberKind::Property,
            Cardinality::One,
        ))
        .insert(PluggedEntry::new(
            PlugItem::Quality(spec.neg.as_str().to_string()),
            MemberKind::Property,
            Cardinality::One,
        ));
    PluggableOntology::new(
        spec.term.clone(),
        socket,
        ISocket::non(),
        Some((spec.pos.clone(), spec.neg.clone())),
    )
    .expect("intangible ontologies always carry Non-")
}

/// One ontology per meaning of a term with several definitions.
pub fn intangible_variants<P, N>(
    term: &ConceptName,
    pairs: impl IntoIterator<Item = (P, N)>,
) -> Result<Vec<PluggableOntology>, IntangibleError>
where
    P: Into<String>,
    N: Into<String>,
{
    let ontologies = pairs
        .into_iter()
        .map(|(pos, neg)| IntangibleSpec::new(term.clone(), pos, neg).map(|s| build_intangible(&s)))
        .collect::<Result<Vec<_>, _>>()?;
    if ontologies.is_empty() {
        return Err(IntangibleError::EmptyList);
    }
    Ok(ontologies)
}
