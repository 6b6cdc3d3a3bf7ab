//! DSocket pattern checks on general ontology graphs.
//!
//! A graph is a set of typed nodes joined by composition edges (whole to
//! part) and plugged-in edges (connector to plugged node). The pattern is a
//! star: one root class owning at most one Socket and exactly one iSocket,
//! each with its plugged-in children.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{IdentityLabel, PlugItem, PluggableOntology, NON_TOKEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Class,
    Socket,
    ISocket,
    PosClass,
    NegClass,
}

impl NodeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Class => "class",
            NodeKind::Socket => "socket",
            NodeKind::ISocket => "isocket",
            NodeKind::PosClass => "pos",
            NodeKind::NegClass => "neg",
        }
    }

    pub fn is_connector(self) -> bool {
        matches!(self, NodeKind::Socket | NodeKind::ISocket)
    }
}

/// Edge kinds are a closed set: there is no inheritance edge to misuse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    /// `from` is the whole, `to` the part.
    Composition,
    /// `from` is the connector, `to` the plugged node. The cardinality is
    /// stored as given so that non-boolean values can be reported.
    PluggedIn(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: Option<String>,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        Node {
            id: id.into(),
            kind,
            label: None,
        }
    }

    pub fn labeled(id: impl Into<String>, kind: NodeKind, label: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            kind,
            label: Some(label.into()),
        }
    }

    /// The label, falling back to the id.
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }

    fn is_non(&self) -> bool {
        self.display_label() == NON_TOKEN
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn composition(from: impl Into<String>, to: impl Into<String>) -> Self {
        Edge {
            from: from.into(),
            to: to.into(),
            kind: EdgeKind::Composition,
        }
    }

    pub fn plugged(from: impl Into<String>, to: impl Into<String>, cardinality: u32) -> Self {
        Edge {
            from: from.into(),
            to: to.into(),
            kind: EdgeKind::PluggedIn(cardinality),
        }
    }

    pub fn describe(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

/// Node ids are unique, edges reference existing nodes and no two edges
/// join the same ordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OntologyGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl OntologyGraph {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, PatternError> {
        let mut ids = BTreeSet::new();
        for node in &nodes {
            if node.id.is_empty() {
                return Err(PatternError::MalformedGraph("empty node id".into()));
            }
            if !ids.insert(node.id.as_str()) {
                return Err(PatternError::MalformedGraph(format!("duplicate node id {}", node.id)));
            }
        }
        let mut pairs = BTreeSet::new();
        for edge in &edges {
            for end in [&edge.from, &edge.to] {
                if !ids.contains(end.as_str()) {
                    return Err(PatternError::MalformedGraph(format!(
                        "edge {} references unknown node {end}",
                        edge.describe()
                    )));
                }
            }
            if !pairs.insert((edge.from.as_str(), edge.to.as_str())) {
                return Err(PatternError::MalformedGraph(format!(
                    "duplicate edge {}",
                    edge.describe()
                )));
            }
        }
        Ok(OntologyGraph { nodes, edges })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    fn kind(&self, id: &str) -> NodeKind {
        self.node(id).expect("edge endpoints exist").kind
    }

    fn incoming<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.to == id)
    }

    fn outgoing<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.from == id)
    }

    fn compositions_into<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.incoming(id).filter(|e| e.kind == EdgeKind::Composition)
    }

    /// Composition children of `id` with the given kind.
    fn owned<'a>(&'a self, id: &'a str, kind: NodeKind) -> impl Iterator<Item = &'a str> + 'a {
        self.outgoing(id)
            .filter(|e| e.kind == EdgeKind::Composition)
            .map(|e| e.to.as_str())
            .filter(move |to| self.kind(to) == kind)
    }

    /// Plugged-in edges leaving `id` as (target, cardinality).
    fn plugged<'a>(&'a self, id: &'a str) -> impl Iterator<Item = (&'a Node, u32)> + 'a {
        self.outgoing(id).filter_map(|e| match e.kind {
            EdgeKind::PluggedIn(c) => Some((self.node(&e.to).expect("edge endpoints exist"), c)),
            EdgeKind::Composition => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Plugged-in cardinalities are 0 or 1.
    R1,
    /// At most one `Non-` per iSocket.
    R2,
    /// `Non-` is a class plugged only into iSockets.
    R3,
    /// Each connector belongs to exactly one root class, and a root owns
    /// at most one Socket and one iSocket.
    R4,
    /// Composition and plugged-in are the only relations. Always holds,
    /// since [`EdgeKind`] has no other variant.
    R5,
    /// pos/neg classes come as one pair plugged into a Socket.
    R6,
    /// A Socket carrying a pos/neg pair holds nothing else.
    R7,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    pub rule: Rule,
    /// Node id, or `from->to` for an edge.
    pub target: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.rule, self.target, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Naming lints. They never make a graph non-conformant.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_conformant(&self) -> bool {
        self.violations.is_empty()
    }

    fn flag(&mut self, rule: Rule, target: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            target: target.into(),
            message: message.into(),
        });
    }
}

pub fn validate(graph: &OntologyGraph) -> ValidationReport {
    let mut report = ValidationReport::default();

    for edge in graph.edges() {
        if let EdgeKind::PluggedIn(c) = edge.kind {
            if c > 1 {
                report.flag(Rule::R1, edge.describe(), format!("cardinality {c} is not 0 or 1"));
            }
        }
    }

    for node in graph.nodes() {
        let id = node.id.as_str();
        match node.kind {
            NodeKind::ISocket => {
                let nons = graph.plugged(id).filter(|(target, _)| target.is_non()).count();
                if nons > 1 {
                    report.flag(Rule::R2, id, format!("{nons} Non- nodes plugged in"));
                }
            }
            NodeKind::Socket => {
                let kinds: Vec<NodeKind> = graph.plugged(id).map(|(t, _)| t.kind).collect();
                let pos = kinds.iter().filter(|k| **k == NodeKind::PosClass).count();
                let neg = kinds.iter().filter(|k| **k == NodeKind::NegClass).count();
                if pos + neg > 0 {
                    if pos != 1 || neg != 1 {
                        report.flag(
                            Rule::R6,
                            id,
                            format!("expected one pos and one neg class, found {pos} and {neg}"),
                        );
                    }
                    if kinds.len() > pos + neg {
                        report.flag(Rule::R7, id, "pos/neg qualities mixed with other plugged entries");
                    }
                }
            }
            _ => {}
        }

        if node.kind.is_connector() {
            let parents: Vec<&Edge> = graph.compositions_into(id).collect();
            match parents.as_slice() {
                [edge] if graph.kind(&edge.from) == NodeKind::Class => {}
                [edge] => report.flag(Rule::R4, id, format!("owner {} is not a class", edge.from)),
                _ => report.flag(
                    Rule::R4,
                    id,
                    format!("expected one owning class, found {}", parents.len()),
                ),
            }
            let expected = match node.kind {
                NodeKind::Socket => "Socket",
                _ => "iSocket",
            };
            if node.display_label() != expected {
                report.warnings.push(format!(
                    "{} node {id} is labeled {:?}; naming it {expected:?} keeps the pattern recognizable",
                    node.kind.keyword(),
                    node.display_label()
                ));
            }
        }

        if node.kind == NodeKind::Class {
            for kind in [NodeKind::Socket, NodeKind::ISocket] {
                let count = graph.owned(id, kind).count();
                if count > 1 {
                    report.flag(Rule::R4, id, format!("owns {count} {} nodes", kind.keyword()));
                }
            }
        }

        if node.is_non() {
            if node.kind != NodeKind::Class {
                report.flag(Rule::R3, id, "Non- must be a class");
            }
            let stray = graph.edges().iter().filter(|e| e.from == id || e.to == id).any(|e| {
                !(e.to == id && matches!(e.kind, EdgeKind::PluggedIn(_)) && graph.kind(&e.from) == NodeKind::ISocket)
            });
            if stray {
                report.flag(Rule::R3, id, "Non- may only be plugged into an iSocket");
            }
        }

        if matches!(node.kind, NodeKind::PosClass | NodeKind::NegClass) {
            let incident: Vec<&Edge> = graph.edges().iter().filter(|e| e.from == id || e.to == id).collect();
            let attached = matches!(
                incident.as_slice(),
                [e] if e.to == id
                    && matches!(e.kind, EdgeKind::PluggedIn(_))
                    && graph.kind(&e.from) == NodeKind::Socket
            );
            if !attached {
                report.flag(
                    Rule::R6,
                    id,
                    format!(
                        "{} class must be plugged into exactly one Socket and nothing else",
                        node.kind.keyword()
                    ),
                );
            }
        }
    }

    report
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternInstance {
    pub root: String,
    pub socket: Option<String>,
    pub isocket: String,
    /// Plugged nodes of both connectors, sorted by (id, cardinality).
    pub plugged: Vec<(String, u32)>,
}

impl PatternInstance {
    /// The instance as a standalone graph: root, connectors, plugged nodes
    /// and only the edges between them that belong to the star.
    pub fn to_graph(&self, host: &OntologyGraph) -> OntologyGraph {
        let mut ids: Vec<&str> = vec![&self.root];
        ids.extend(self.socket.as_deref());
        ids.push(&self.isocket);
        ids.extend(self.plugged.iter().map(|(id, _)| id.as_str()));
        let members: BTreeSet<&str> = ids.into_iter().collect();
        let nodes = host
            .nodes()
            .iter()
            .filter(|n| members.contains(n.id.as_str()))
            .cloned()
            .collect();

        let connectors: Vec<&str> = self
            .socket
            .iter()
            .map(String::as_str)
            .chain([self.isocket.as_str()])
            .collect();
        let mut edges: Vec<Edge> = connectors.iter().map(|c| Edge::composition(&self.root, *c)).collect();
        for connector in connectors {
            edges.extend(
                host.outgoing(connector)
                    .filter(|e| matches!(e.kind, EdgeKind::PluggedIn(_)))
                    .cloned(),
            );
        }
        OntologyGraph::new(nodes, edges).expect("sub-star of a well-formed graph")
    }
}

impl fmt::Display for PatternInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root={} socket={} isocket={} plugged=[",
            self.root,
            self.socket.as_deref().unwrap_or("-"),
            self.isocket
        )?;
        for (i, (id, c)) in self.plugged.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}:{c}")?;
        }
        f.write_str("]")
    }
}

/// Finds every DSocket star in `graph`, ordered by root id.
///
/// Each iSocket seeds at most one instance. It matches when:
/// - the iSocket has exactly one composition parent, a class (the root),
///   and the root owns no other iSocket and at most one Socket;
/// - the Socket, if any, has the root as its only composition parent;
/// - neither root nor connectors are labeled `Non-`;
/// - the iSocket's plugged nodes are classes with cardinality 0 or 1, at
///   most one of them `Non-`;
/// - the Socket's plugged nodes are classes or pos/neg classes with
///   cardinality 0 or 1, none of them `Non-`, and pos/neg appear either not
///   at all or as a single pair with nothing else.
///
/// Anything else is left out, so every instance validates on its own.
pub fn detect(graph: &OntologyGraph) -> Vec<PatternInstance> {
    let mut found: Vec<PatternInstance> = graph
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::ISocket)
        .filter_map(|isocket| star_at(graph, isocket))
        .collect();
    found.sort();
    found
}

fn star_at(graph: &OntologyGraph, isocket: &Node) -> Option<PatternInstance> {
    let parents: Vec<&Edge> = graph.compositions_into(&isocket.id).collect();
    let [parent] = parents.as_slice() else {
        return None;
    };
    let root = graph.node(&parent.from)?;
    if root.kind != NodeKind::Class {
        return None;
    }
    if graph.owned(&root.id, NodeKind::ISocket).count() != 1 {
        return None;
    }
    let sockets: Vec<&str> = graph.owned(&root.id, NodeKind::Socket).collect();
    let socket = match sockets.as_slice() {
        [] => None,
        [id] => Some(graph.node(id)?),
        _ => return None,
    };
    if let Some(socket) = socket {
        if graph.compositions_into(&socket.id).count() != 1 {
            return None;
        }
    }
    if root.is_non() || isocket.is_non() || socket.is_some_and(Node::is_non) {
        return None;
    }

    let mut plugged = Vec::new();

    let mut nons = 0;
    for (target, c) in graph.plugged(&isocket.id) {
        if c > 1 || target.kind != NodeKind::Class {
            return None;
        }
        nons += target.is_non() as usize;
        plugged.push((target.id.clone(), c));
    }
    if nons > 1 {
        return None;
    }

    if let Some(socket) = socket {
        let (mut pos, mut neg, mut classes) = (0, 0, 0);
        for (target, c) in graph.plugged(&socket.id) {
            if c > 1 || target.is_non() {
                return None;
            }
            match target.kind {
                NodeKind::Class => classes += 1,
                NodeKind::PosClass => pos += 1,
                NodeKind::NegClass => neg += 1,
                NodeKind::Socket | NodeKind::ISocket => return None,
            }
            plugged.push((target.id.clone(), c));
        }
        let qualities_ok = (pos, neg) == (0, 0) || ((pos, neg) == (1, 1) && classes == 0);
        if !qualities_ok {
            return None;
        }
    }

    plugged.sort();
    Some(PatternInstance {
        root: root.id.clone(),
        socket: socket.map(|s| s.id.clone()),
        isocket: isocket.id.clone(),
        plugged,
    })
}

/// Encodes an ontology as a graph.
///
/// Node ids are `n0`, `n1`, ... in the order root, Socket (left out when
/// empty), iSocket, socket entries sorted by kind then name, identities with
/// `Non-` first. pos/neg qualities become pos/neg class nodes.
pub fn to_graph(ontology: &PluggableOntology) -> OntologyGraph {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut next = 0usize;
    let mut fresh = || {
        let id = format!("n{next}");
        next += 1;
        id
    };

    let root = fresh();
    nodes.push(Node::labeled(&root, NodeKind::Class, ontology.root().as_str()));

    let socket = (!ontology.socket().is_empty()).then(|| {
        let socket = fresh();
        nodes.push(Node::labeled(&socket, NodeKind::Socket, "Socket"));
        edges.push(Edge::composition(&root, &socket));
        socket
    });
    let isocket = fresh();
    nodes.push(Node::labeled(&isocket, NodeKind::ISocket, "iSocket"));
    edges.push(Edge::composition(&root, &isocket));

    if let Some(socket) = &socket {
        for entry in ontology.socket().sorted() {
            let kind = match &entry.item {
                PlugItem::Quality(text) if ontology.pos().is_some_and(|p| p.as_str() == text) => NodeKind::PosClass,
                PlugItem::Quality(text) if ontology.neg().is_some_and(|n| n.as_str() == text) => NodeKind::NegClass,
                _ => NodeKind::Class,
            };
            let id = fresh();
            nodes.push(Node::labeled(&id, kind, entry.item.text()));
            edges.push(Edge::plugged(socket, &id, entry.cardinality.value().into()));
        }
    }

    for label in ontology.isocket().canonical() {
        let text = match label {
            IdentityLabel::Non => NON_TOKEN.to_string(),
            IdentityLabel::Named { name, negated: false } => name.to_string(),
            IdentityLabel::Named { name, negated: true } => format!("{NON_TOKEN}{name}"),
        };
        let id = fresh();
        nodes.push(Node::labeled(&id, NodeKind::Class, text));
        edges.push(Edge::plugged(&isocket, &id, 1));
    }

    OntologyGraph::new(nodes, edges).expect("fresh ids are unique")
}
