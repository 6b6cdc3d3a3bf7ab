//! Value types shared by the whole engine: concept names, base concepts,
//! plugged entries, sockets, identity labels and the derived pluggable
//! ontology.
//!
//! Everything here is an immutable value. Constructors check the invariants
//! once; accessors hand out borrows only.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// The distinguished identity token.
pub const NON_TOKEN: &str = "Non-";

/// Lower-case words the DSL uses as keywords. A `ConceptName` may not spell
/// one of them, so every name the engine accepts can be written back out.
pub const RESERVED_WORDS: &[&str] = &[
    "add",
    "class",
    "composition",
    "concept",
    "delivery",
    "design",
    "edge",
    "essential",
    "from",
    "functionality",
    "graph",
    "identity",
    "intangible",
    "isocket",
    "label",
    "manufacturing",
    "neg",
    "negated",
    "node",
    "nonconcept",
    "part",
    "plugged",
    "pos",
    "productline",
    "property",
    "remove",
    "requires",
    "restore",
    "socket",
    "stage",
    "variant",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid name {0:?}")]
    InvalidName(String),
    #[error("duplicate member {0}")]
    DuplicateMember(ConceptName),
    #[error("functionality {functionality} requires unknown member {requirement}")]
    UnresolvedRequirement {
        functionality: ConceptName,
        requirement: ConceptName,
    },
    #[error("{0} attribute is empty")]
    EmptyAttribute(AttributeKind),
    #[error("cardinality {0} is not boolean")]
    InvalidCardinality(u32),
    #[error("isocket already holds the Non- token")]
    DuplicateNon,
    #[error("a modified ontology must carry the Non- token in its isocket")]
    MissingNon,
}

/// Identifier for concepts, members and identities.
///
/// Starts with an ASCII letter, continues with letters, digits, `-` or `_`.
/// Case-sensitive. `Non-` and the DSL keywords are rejected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptName(String);

impl ConceptName {
    pub fn new(text: impl Into<String>) -> Result<Self, ModelError> {
        let text = text.into();
        if Self::is_valid(&text) {
            Ok(ConceptName(text))
        } else {
            Err(ModelError::InvalidName(text))
        }
    }

    /// True when `text` would be accepted by [`ConceptName::new`].
    pub fn is_valid(text: &str) -> bool {
        let mut chars = text.chars();
        let starts_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
        starts_ok
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            && text != NON_TOKEN
            && !RESERVED_WORDS.contains(&text)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConceptName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for ConceptName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for ConceptName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for ConceptName {
    type Error = ModelError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        ConceptName::new(value)
    }
}

/// What a member of a base concept is. The declaration order is also the
/// canonical sort order: part < functionality < property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemberKind {
    Part,
    Functionality,
    Property,
}

impl MemberKind {
    pub const ALL: [MemberKind; 3] = [MemberKind::Part, MemberKind::Functionality, MemberKind::Property];

    /// The DSL keyword for this kind.
    pub fn keyword(self) -> &'static str {
        match self {
            MemberKind::Part => "part",
            MemberKind::Functionality => "functionality",
            MemberKind::Property => "property",
        }
    }
}

impl fmt::Display for MemberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartSpec {
    pub name: ConceptName,
    /// Removing an essential part breaks the concept's identity.
    pub essential: bool,
}

impl PartSpec {
    pub fn new(name: ConceptName) -> Self {
        PartSpec { name, essential: false }
    }

    pub fn essential(name: ConceptName) -> Self {
        PartSpec { name, essential: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionalitySpec {
    pub name: ConceptName,
    /// Members this behavior depends on. Each must be a part or a property
    /// of the owning concept.
    pub requires: BTreeSet<ConceptName>,
}

impl FunctionalitySpec {
    pub fn new(name: ConceptName) -> Self {
        FunctionalitySpec {
            name,
            requires: BTreeSet::new(),
        }
    }

    pub fn requiring(name: ConceptName, requires: impl IntoIterator<Item = ConceptName>) -> Self {
        FunctionalitySpec {
            name,
            requires: requires.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropertySpec {
    pub name: ConceptName,
}

impl PropertySpec {
    pub fn new(name: ConceptName) -> Self {
        PropertySpec { name }
    }
}

/// An unmodified concept with its parts, functionalities and properties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseConcept {
    name: ConceptName,
    parts: Vec<PartSpec>,
    functionalities: Vec<FunctionalitySpec>,
    properties: Vec<PropertySpec>,
}

impl BaseConcept {
    /// Builds a concept after checking that member names are pairwise
    /// distinct and every `requires` entry resolves.
    pub fn new(
        name: ConceptName,
        parts: Vec<PartSpec>,
        functionalities: Vec<FunctionalitySpec>,
        properties: Vec<PropertySpec>,
    ) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        let names = parts
            .iter()
            .map(|p| &p.name)
            .chain(functionalities.iter().map(|f| &f.name))
            .chain(properties.iter().map(|p| &p.name));
        for member in names {
            if !seen.insert(member) {
                return Err(ModelError::DuplicateMember(member.clone()));
            }
        }

        for functionality in &functionalities {
            for requirement in &functionality.requires {
                let resolves =
                    parts.iter().any(|p| &p.name == requirement) || properties.iter().any(|p| &p.name == requirement);
                if !resolves {
                    return Err(ModelError::UnresolvedRequirement {
                        functionality: functionality.name.clone(),
                        requirement: requirement.clone(),
                    });
                }
            }
        }

        Ok(BaseConcept {
            name,
            parts,
            functionalities,
            properties,
        })
    }

    pub fn name(&self) -> &ConceptName {
        &self.name
    }

    pub fn parts(&self) -> &[PartSpec] {
        &self.parts
    }

    pub fn functionalities(&self) -> &[FunctionalitySpec] {
        &self.functionalities
    }

    pub fn properties(&self) -> &[PropertySpec] {
        &self.properties
    }

    pub fn part(&self, name: &str) -> Option<&PartSpec> {
        self.parts.iter().find(|p| p.name.as_str() == name)
    }

    pub fn functionality(&self, name: &str) -> Option<&FunctionalitySpec> {
        self.functionalities.iter().find(|f| f.name.as_str() == name)
    }

    /// Kind of the member called `name`, if the concept has one.
    pub fn kind_of(&self, name: &str) -> Option<MemberKind> {
        self.members()
            .find(|(_, member)| member.as_str() == name)
            .map(|(kind, _)| kind)
    }

    /// All members in declaration order, parts first.
    pub fn members(&self) -> impl Iterator<Item = (MemberKind, &ConceptName)> {
        self.parts
            .iter()
            .map(|p| (MemberKind::Part, &p.name))
            .chain(
                self.functionalities
                    .iter()
                    .map(|f| (MemberKind::Functionality, &f.name)),
            )
            .chain(self.properties.iter().map(|p| (MemberKind::Property, &p.name)))
    }

    pub fn member_count(&self) -> usize {
        self.parts.len() + self.functionalities.len() + self.properties.len()
    }
}

/// Boolean cardinality of a plugged-in entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cardinality {
    /// Removed.
    Zero,
    /// Added.
    One,
}

impl Cardinality {
    pub fn value(self) -> u8 {
        match self {
            Cardinality::Zero => 0,
            Cardinality::One => 1,
        }
    }
}

impl TryFrom<u32> for Cardinality {
    type Error = ModelError;

    fn try_from(value: u32) -> Result<Self, Self::Error> {
        match value {
            0 => Ok(Cardinality::Zero),
            1 => Ok(Cardinality::One),
            other => Err(ModelError::InvalidCardinality(other)),
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// The thing plugged into a socket: either a named member or a free-text
/// quality (the mirrored pos/neg attributes of intangible concepts).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlugItem {
    Member(ConceptName),
    Quality(String),
}

impl PlugItem {
    pub fn text(&self) -> &str {
        match self {
            PlugItem::Member(name) => name.as_str(),
            PlugItem::Quality(text) => text,
        }
    }
}

impl Ord for PlugItem {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |item: &PlugItem| matches!(item, PlugItem::Quality(_)) as u8;
        self.text().cmp(other.text()).then_with(|| rank(self).cmp(&rank(other)))
    }
}

impl PartialOrd for PlugItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<ConceptName> for PlugItem {
    fn from(name: ConceptName) -> Self {
        PlugItem::Member(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PluggedEntry {
    pub item: PlugItem,
    pub kind: MemberKind,
    pub cardinality: Cardinality,
}

impl PluggedEntry {
    pub fn new(item: impl Into<PlugItem>, kind: MemberKind, cardinality: Cardinality) -> Self {
        PluggedEntry {
            item: item.into(),
            kind,
            cardinality,
        }
    }

    /// Canonical ordering key: kind, then item text.
    pub fn sort_key(&self) -> (MemberKind, &PlugItem) {
        (self.kind, &self.item)
    }
}

/// Connector for plugged-in parts, functionalities and properties.
/// Identities never go here; they live in the [`ISocket`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Socket {
    entries: Vec<PluggedEntry>,
}

impl Socket {
    pub fn new() -> Self {
        Socket::default()
    }

    /// Returns a socket holding `entry`. An existing entry with the same
    /// (item, kind) is replaced in place; new items go to the end.
    pub fn insert(mut self, entry: PluggedEntry) -> Self {
        match self
            .entries
            .iter_mut()
            .find(|e| e.item == entry.item && e.kind == entry.kind)
        {
            Some(existing) => *existing = entry,
            None => self.entries.push(entry),
        }
        self
    }

    pub fn entries(&self) -> &[PluggedEntry] {
        &self.entries
    }

    pub fn get(&self, item: &PlugItem, kind: MemberKind) -> Option<&PluggedEntry> {
        self.entries.iter().find(|e| &e.item == item && e.kind == kind)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical order.
    pub fn sorted(&self) -> Vec<&PluggedEntry> {
        let mut sorted: Vec<_> = self.entries.iter().collect();
        sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        sorted
    }
}

impl FromIterator<PluggedEntry> for Socket {
    fn from_iter<T: IntoIterator<Item = PluggedEntry>>(iter: T) -> Self {
        iter.into_iter().fold(Socket::new(), Socket::insert)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IdentityLabel {
    /// The `Non-` token itself.
    Non,
    Named {
        name: ConceptName,
        negated: bool,
    },
}

impl IdentityLabel {
    pub fn named(name: ConceptName) -> Self {
        IdentityLabel::Named { name, negated: false }
    }

    pub fn negated(name: ConceptName) -> Self {
        IdentityLabel::Named { name, negated: true }
    }

    pub fn is_non(&self) -> bool {
        matches!(self, IdentityLabel::Non)
    }
}

impl fmt::Display for IdentityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentityLabel::Non => f.write_str(NON_TOKEN),
            IdentityLabel::Named { name, negated: false } => write!(f, "{name}"),
            IdentityLabel::Named { name, negated: true } => write!(f, "{name} negated"),
        }
    }
}

/// Identity socket. Cardinality is implicitly 1 and is not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ISocket {
    identities: Vec<IdentityLabel>,
}

impl ISocket {
    pub fn new() -> Self {
        ISocket::default()
    }

    /// An isocket holding only `Non-`.
    pub fn non() -> Self {
        ISocket {
            identities: vec![IdentityLabel::Non],
        }
    }

    /// Appends a label; fails with `DuplicateNon` on a second `Non-`.
    pub fn push(mut self, label: IdentityLabel) -> Result<Self, ModelError> {
        if label.is_non() && self.has_non() {
            return Err(ModelError::DuplicateNon);
        }
        self.identities.push(label);
        Ok(self)
    }

    pub fn identities(&self) -> &[IdentityLabel] {
        &self.identities
    }

    pub fn has_non(&self) -> bool {
        self.identities.iter().any(IdentityLabel::is_non)
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    /// `Non-` first, the rest in insertion order.
    pub fn canonical(&self) -> Vec<&IdentityLabel> {
        let non = self.identities.iter().filter(|l| l.is_non());
        let rest = self.identities.iter().filter(|l| !l.is_non());
        non.chain(rest).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttributeKind {
    Pos,
    Neg,
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttributeKind::Pos => "pos",
            AttributeKind::Neg => "neg",
        })
    }
}

fn attribute_text(text: String, kind: AttributeKind) -> Result<String, ModelError> {
    if text.trim().is_empty() {
        Err(ModelError::EmptyAttribute(kind))
    } else {
        Ok(text)
    }
}

/// Positive quality of an intangible Non-concept.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosAttribute(String);

impl PosAttribute {
    pub fn new(text: impl Into<String>) -> Result<Self, ModelError> {
        attribute_text(text.into(), AttributeKind::Pos).map(PosAttribute)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Negative quality of an intangible Non-concept.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NegAttribute(String);

impl NegAttribute {
    pub fn new(text: impl Into<String>) -> Result<Self, ModelError> {
        attribute_text(text.into(), AttributeKind::Neg).map(NegAttribute)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// The derived nano-ontology: one root, one socket, one isocket and, for
/// intangible concepts, a pos/neg pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PluggableOntology {
    root: ConceptName,
    socket: Socket,
    isocket: ISocket,
    qualities: Option<(PosAttribute, NegAttribute)>,
}

impl PluggableOntology {
    pub fn new(
        root: ConceptName,
        socket: Socket,
        isocket: ISocket,
        qualities: Option<(PosAttribute, NegAttribute)>,
    ) -> Result<Self, ModelError> {
        if (!socket.is_empty() || qualities.is_some()) && !isocket.has_non() {
            return Err(ModelError::MissingNon);
        }
        Ok(PluggableOntology {
            root,
            socket,
            isocket,
            qualities,
        })
    }

    pub fn root(&self) -> &ConceptName {
        &self.root
    }

    pub fn socket(&self) -> &Socket {
        &self.socket
    }

    pub fn isocket(&self) -> &ISocket {
        &self.isocket
    }

    pub fn pos(&self) -> Option<&PosAttribute> {
        self.qualities.as_ref().map(|(pos, _)| pos)
    }

    pub fn neg(&self) -> Option<&NegAttribute> {
        self.qualities.as_ref().map(|(_, neg)| neg)
    }

    pub fn is_intangible(&self) -> bool {
        self.qualities.is_some()
    }
}
