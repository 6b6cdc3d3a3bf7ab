//! Generators and reference oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use dsocket::delta::apply;
use dsocket::model::{FunctionalitySpec, PartSpec, PropertySpec};
use dsocket::pattern::{validate, Edge, EdgeKind, Node, NodeKind};
use dsocket::product_line::{Expansion, Stage, StageEntry, StageReport, Variant, VariantSet};
use dsocket::textio::{Document, GraphDef, Item, NonConceptDef, ProductLineDef};
use dsocket::{
    builtin_corpus, BaseConcept, ConceptName, Delta, IdentityLabel, IntangibleSpec, MemberKind, MemberState, ModOp,
    OntologyGraph, PatternInstance,
};
use proptest::prelude::*;
use proptest::sample::Index;

pub fn n(text: &str) -> ConceptName {
    ConceptName::new(text).unwrap()
}

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub const KINDS: [MemberKind; 3] = MemberKind::ALL;

pub fn arb_kind() -> impl Strategy<Value = MemberKind> {
    prop::sample::select(KINDS.to_vec())
}

pub fn arb_stage() -> impl Strategy<Value = Stage> {
    prop::sample::select(Stage::ALL.to_vec())
}

/// Any valid concept name, including ones with `-` and `_`.
pub fn arb_name() -> impl Strategy<Value = ConceptName> {
    "[A-Za-z][A-Za-z0-9_-]{0,7}"
        .prop_filter("valid name", |s| ConceptName::is_valid(s))
        .prop_map(|s| ConceptName::new(s).unwrap())
}

/// Free text usable as a pos or neg quality.
pub fn arb_quality() -> impl Strategy<Value = String> {
    prop_oneof!["[a-z ]{1,16}", "\\PC{1,12}", Just("say \"no\" \\ maybe".to_string()),]
        .prop_filter("non-blank", |s| !s.trim().is_empty())
}

pub fn arb_identity() -> impl Strategy<Value = IdentityLabel> {
    prop_oneof![
        1 => Just(IdentityLabel::Non),
        4 => (arb_name(), any::<bool>()).prop_map(|(name, negated)| IdentityLabel::Named { name, negated }),
    ]
}

/// A base concept with up to ten members. Functionalities require random
/// subsets of the parts and properties.
pub fn arb_concept() -> impl Strategy<Value = BaseConcept> {
    (arb_name(), prop::collection::btree_set(arb_name(), 0..10))
        .prop_flat_map(|(name, members)| {
            let members: Vec<ConceptName> = members.into_iter().filter(|m| *m != name).collect();
            let count = members.len();
            (
                Just(name),
                Just(members),
                prop::collection::vec((0u8..3, any::<bool>(), any::<u16>()), count),
            )
        })
        .prop_map(|(name, members, traits)| {
            let mut parts = Vec::new();
            let mut properties = Vec::new();
            let mut wanted = Vec::new();
            for (member, (kind, essential, mask)) in members.into_iter().zip(traits) {
                match kind {
                    0 if essential => parts.push(PartSpec::essential(member)),
                    0 => parts.push(PartSpec::new(member)),
                    1 => wanted.push((member, mask)),
                    _ => properties.push(PropertySpec::new(member)),
                }
            }
            let requirable: Vec<ConceptName> = parts
                .iter()
                .map(|p| p.name.clone())
                .chain(properties.iter().map(|p| p.name.clone()))
                .collect();
            let functionalities = wanted
                .into_iter()
                .map(|(member, mask)| {
                    let requires = requirable
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i < 16 && mask & (1 << i) != 0 && mask % 3 != 0)
                        .map(|(_, r)| r.clone());
                    FunctionalitySpec::requiring(member, requires)
                })
                .collect();
            BaseConcept::new(name, parts, functionalities, properties).unwrap()
        })
}

/// Raw op material, bound to a concept by [`ops_for`].
#[derive(Debug, Clone)]
pub enum RawOp {
    Remove(Index),
    Restore(Index),
    AddExisting(Index),
    AddNew(MemberKind, ConceptName),
    Identity(IdentityLabel),
}

pub fn arb_raw_op() -> impl Strategy<Value = RawOp> {
    prop_oneof![
        5 => any::<Index>().prop_map(RawOp::Remove),
        3 => any::<Index>().prop_map(RawOp::Restore),
        1 => any::<Index>().prop_map(RawOp::AddExisting),
        2 => (arb_kind(), arb_name()).prop_map(|(k, name)| RawOp::AddNew(k, name)),
        1 => arb_identity().prop_map(RawOp::Identity),
    ]
}

/// Turns raw material into ops over `base`. Member references pick among
/// the base members and the names added so far, so most ops are legal.
pub fn ops_for(base: &BaseConcept, raw: &[RawOp]) -> Vec<ModOp> {
    let mut known: Vec<(MemberKind, ConceptName)> = base.members().map(|(k, name)| (k, name.clone())).collect();
    let mut ops = Vec::new();
    for op in raw {
        let pick = |i: &Index| (!known.is_empty()).then(|| known[i.index(known.len())].clone());
        let op = match op {
            RawOp::Remove(i) => pick(i).map(|(k, name)| ModOp::Remove(k, name)),
            RawOp::Restore(i) => pick(i).map(|(k, name)| ModOp::Restore(k, name)),
            RawOp::AddExisting(i) => pick(i).map(|(k, name)| ModOp::Add(k, name)),
            RawOp::AddNew(kind, name) => {
                let kind = known.iter().find(|(_, m)| m == name).map_or(*kind, |(k, _)| *k);
                if !known.iter().any(|(_, m)| m == name) && name != base.name() {
                    known.push((kind, name.clone()));
                }
                Some(ModOp::Add(kind, name.clone()))
            }
            RawOp::Identity(label) => Some(ModOp::SetIdentity(label.clone())),
        };
        ops.extend(op);
    }
    ops
}

/// Keeps each op only if the delta still applies with it.
pub fn legal_delta(base: &BaseConcept, ops: Vec<ModOp>) -> Delta {
    let mut delta = Delta::empty(base.name().clone());
    for op in ops {
        delta.ops.push(op);
        if apply(base, &delta).is_err() {
            delta.ops.pop();
        }
    }
    delta
}

pub fn arb_concept_and_delta() -> impl Strategy<Value = (BaseConcept, Delta)> {
    (arb_concept(), prop::collection::vec(arb_raw_op(), 0..14)).prop_map(|(base, raw)| {
        let ops = ops_for(&base, &raw);
        let delta = legal_delta(&base, ops);
        (base, delta)
    })
}

pub fn corpus_concepts() -> Vec<BaseConcept> {
    builtin_corpus().concepts().cloned().collect()
}

pub fn arb_corpus_concept() -> impl Strategy<Value = BaseConcept> {
    prop::sample::select(corpus_concepts())
}

pub fn arb_corpus_delta() -> impl Strategy<Value = (BaseConcept, Delta)> {
    (arb_corpus_concept(), prop::collection::vec(arb_raw_op(), 0..10)).prop_map(|(base, raw)| {
        let ops = ops_for(&base, &raw);
        let delta = legal_delta(&base, ops);
        (base, delta)
    })
}

/// Reference semantics of `apply`, written as a plain replay. Returns the
/// state of every touched member.
pub fn reference_states(base: &BaseConcept, ops: &[ModOp]) -> BTreeMap<(MemberKind, ConceptName), MemberState> {
    let mut last: BTreeMap<(MemberKind, ConceptName), (usize, MemberState)> = BTreeMap::new();
    let mut restored: BTreeMap<ConceptName, usize> = BTreeMap::new();
    for (at, op) in ops.iter().enumerate() {
        match op {
            ModOp::Remove(k, name) => {
                last.insert((*k, name.clone()), (at, MemberState::Removed));
            }
            ModOp::Add(k, name) => {
                last.insert((*k, name.clone()), (at, MemberState::Added));
            }
            ModOp::Restore(k, name) => {
                last.insert((*k, name.clone()), (at, MemberState::Untouched));
                restored.insert(name.clone(), at);
            }
            ModOp::SetIdentity(_) => {}
        }
    }

    let mut out = BTreeMap::new();
    for ((kind, name), (_, state)) in &last {
        out.insert((*kind, name.clone()), *state);
    }
    for f in base.functionalities() {
        let latest_removal = f
            .requires
            .iter()
            .filter_map(|r| {
                let kind = base.kind_of(r.as_str()).unwrap();
                match last.get(&(kind, r.clone())) {
                    Some((at, MemberState::Removed)) => Some(*at),
                    _ => None,
                }
            })
            .max();
        if let Some(removed_at) = latest_removal {
            if restored.get(&f.name).is_none_or(|at| *at < removed_at) {
                out.insert((MemberKind::Functionality, f.name.clone()), MemberState::Removed);
            }
        }
    }
    out.retain(|_, state| *state != MemberState::Untouched);
    out
}

/// The first essential part, in declaration order, whose reference state
/// is Removed.
pub fn reference_breakdown(base: &BaseConcept, ops: &[ModOp]) -> Option<ConceptName> {
    let states = reference_states(base, ops);
    base.parts()
        .iter()
        .filter(|p| p.essential)
        .find(|p| states.get(&(MemberKind::Part, p.name.clone())) == Some(&MemberState::Removed))
        .map(|p| p.name.clone())
}

/// Inverts an expansion by hand: for every touched member, the variants
/// touching it in name order.
pub fn invert_expansion(set: &VariantSet, expansion: &Expansion) -> StageReport {
    let mut names: Vec<&Variant> = set.variants().iter().collect();
    names.sort_by(|a, b| a.name.cmp(&b.name));
    let mut report = StageReport::new();
    for variant in names {
        let outcome = &expansion[&variant.name];
        for member in outcome.effect.members() {
            if member.state == MemberState::Untouched {
                continue;
            }
            report
                .entry((member.kind, member.name.clone()))
                .or_default()
                .push(StageEntry {
                    variant: variant.name.clone(),
                    stage: variant.stage,
                    state: member.state,
                });
        }
    }
    report
}

pub fn arb_variant_set(base: BaseConcept) -> impl Strategy<Value = VariantSet> {
    prop::collection::vec(
        (arb_name(), arb_stage(), prop::collection::vec(arb_raw_op(), 0..8)),
        0..5,
    )
    .prop_map(move |raw| {
        let mut seen = BTreeSet::new();
        let variants = raw
            .into_iter()
            .filter(|(name, _, _)| seen.insert(name.clone()))
            .map(|(name, stage, ops)| Variant {
                name,
                delta: legal_delta(
                    &base,
                    ops_for(&base, &ops)
                        .into_iter()
                        .filter(|op| *op != ModOp::SetIdentity(IdentityLabel::Non))
                        .collect(),
                ),
                stage,
            })
            .collect();
        VariantSet::new(base.name().clone(), variants).unwrap()
    })
}

const GRAPH_LABELS: [&str; 5] = ["Socket", "iSocket", "Clock", "much publicized", "Battery"];

/// Graphs of up to `max_nodes` nodes. Most of them start from zero to two
/// planted stars, with plain class targets in half of the cases, and a few
/// random extra edges then perturb them.
pub fn arb_graph(max_nodes: usize) -> impl Strategy<Value = OntologyGraph> {
    let kind = prop_oneof![
        8 => Just(NodeKind::Class),
        1 => Just(NodeKind::Socket),
        1 => Just(NodeKind::ISocket),
        1 => Just(NodeKind::PosClass),
        1 => Just(NodeKind::NegClass),
    ];
    let label = prop_oneof![
        6 => Just(None),
        1 => Just(Some("Non-")),
        2 => prop::sample::select(GRAPH_LABELS.to_vec()).prop_map(Some),
    ];
    let edge = (
        any::<Index>(),
        any::<Index>(),
        prop_oneof![
            2 => Just(EdgeKind::Composition),
            3 => Just(EdgeKind::PluggedIn(0)),
            3 => Just(EdgeKind::PluggedIn(1)),
            1 => Just(EdgeKind::PluggedIn(2)),
        ],
    );
    (
        prop::collection::vec((kind, label), 1..=max_nodes),
        prop_oneof![1 => Just(0usize), 3 => Just(1), 2 => Just(2)],
        any::<bool>(),
        any::<bool>(),
        prop::collection::vec(edge, 0..4),
    )
        .prop_map(|(specs, stars, with_socket, clean, extra)| {
            let mut nodes: Vec<Node> = specs
                .into_iter()
                .enumerate()
                .map(|(i, (kind, label))| Node {
                    id: format!("v{i}"),
                    kind,
                    label: label.map(str::to_string),
                })
                .collect();
            let mut edges: Vec<Edge> = Vec::new();
            let mut pairs = BTreeSet::new();
            let mut push = |edges: &mut Vec<Edge>, from: usize, to: usize, kind: EdgeKind| {
                if from != to && pairs.insert((from, to)) {
                    edges.push(Edge {
                        from: format!("v{from}"),
                        to: format!("v{to}"),
                        kind,
                    });
                }
            };
            let count = nodes.len();
            let star_size = count / stars.max(1);
            for star in 0..stars {
                let at = star * star_size;
                if star_size < 3 {
                    break;
                }
                let (root, socket, isocket) = (at, at + 1, at + 2);
                nodes[root].kind = NodeKind::Class;
                nodes[socket].kind = NodeKind::Socket;
                nodes[isocket].kind = NodeKind::ISocket;
                if clean {
                    nodes[root].label = None;
                }
                push(&mut edges, root, isocket, EdgeKind::Composition);
                if with_socket {
                    push(&mut edges, root, socket, EdgeKind::Composition);
                }
                for (target, node) in nodes.iter_mut().enumerate().take(at + star_size).skip(at + 3) {
                    if clean {
                        node.kind = NodeKind::Class;
                        node.label = None;
                    }
                    let from = if target % 3 == 0 || !with_socket {
                        isocket
                    } else {
                        socket
                    };
                    push(&mut edges, from, target, EdgeKind::PluggedIn((target % 2) as u32));
                }
            }
            for (a, b, kind) in extra {
                push(&mut edges, a.index(count), b.index(count), kind);
            }
            OntologyGraph::new(nodes, edges).unwrap()
        })
}

/// Brute-force detection. Enumerates every node subset and keeps those
/// that form a maximal DSocket star: one class root owning one iSocket and
/// at most one Socket (and no other connector of either kind), connectors
/// owned by nothing else, the subset equal to root + connectors + all
/// their plugged targets, no connector among the targets, and the star
/// conformant when cut out of the host.
pub fn brute_force_detect(graph: &OntologyGraph) -> Vec<PatternInstance> {
    let nodes = graph.nodes();
    assert!(nodes.len() <= 16, "oracle is exponential");
    let edges = graph.edges();
    let kind_of = |id: &str| nodes.iter().find(|n| n.id == id).unwrap().kind;
    let composition_parents = |id: &str| -> Vec<&str> {
        edges
            .iter()
            .filter(|e| e.to == id && e.kind == EdgeKind::Composition)
            .map(|e| e.from.as_str())
            .collect()
    };
    let owned = |id: &str, kind: NodeKind| -> Vec<&str> {
        edges
            .iter()
            .filter(|e| e.from == id && e.kind == EdgeKind::Composition && kind_of(&e.to) == kind)
            .map(|e| e.to.as_str())
            .collect()
    };
    let plugged_out = |id: &str| -> Vec<&Edge> {
        edges
            .iter()
            .filter(|e| e.from == id && matches!(e.kind, EdgeKind::PluggedIn(_)))
            .collect()
    };

    let mut found = Vec::new();
    for mask in 1u32..(1 << nodes.len()) {
        let subset: Vec<&Node> = (0..nodes.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &nodes[i])
            .collect();
        let isockets: Vec<&Node> = subset.iter().copied().filter(|n| n.kind == NodeKind::ISocket).collect();
        let sockets: Vec<&Node> = subset.iter().copied().filter(|n| n.kind == NodeKind::Socket).collect();
        let ([isocket], socket) = (isockets.as_slice(), sockets.as_slice()) else {
            continue;
        };
        let socket = match socket {
            [] => None,
            [s] => Some(*s),
            _ => continue,
        };
        for root in subset.iter().filter(|n| n.kind == NodeKind::Class) {
            if composition_parents(&isocket.id) != [root.id.as_str()]
                || owned(&root.id, NodeKind::ISocket) != [isocket.id.as_str()]
            {
                continue;
            }
            let owned_sockets = owned(&root.id, NodeKind::Socket);
            if owned_sockets != socket.iter().map(|s| s.id.as_str()).collect::<Vec<_>>() {
                continue;
            }
            if socket.is_some_and(|s| composition_parents(&s.id).len() != 1) {
                continue;
            }
            let connectors: Vec<&str> = socket
                .iter()
                .map(|s| s.id.as_str())
                .chain([isocket.id.as_str()])
                .collect();
            let star_edges: Vec<&Edge> = connectors.iter().flat_map(|c| plugged_out(c)).collect();
            if star_edges.iter().any(|e| kind_of(&e.to).is_connector()) {
                continue;
            }
            let mut closure: BTreeSet<&str> = star_edges.iter().map(|e| e.to.as_str()).collect();
            closure.insert(&root.id);
            closure.extend(connectors.iter().copied());
            let chosen: BTreeSet<&str> = subset.iter().map(|n| n.id.as_str()).collect();
            if closure != chosen {
                continue;
            }

            let cut_nodes = subset.iter().map(|n| (*n).clone()).collect();
            let mut cut_edges: Vec<Edge> = connectors
                .iter()
                .map(|c| Edge::composition(root.id.clone(), c.to_string()))
                .collect();
            cut_edges.extend(star_edges.iter().map(|e| (*e).clone()));
            let cut = OntologyGraph::new(cut_nodes, cut_edges).unwrap();
            if !validate(&cut).is_conformant() {
                continue;
            }

            let mut plugged: Vec<(String, u32)> = star_edges
                .iter()
                .map(|e| match e.kind {
                    EdgeKind::PluggedIn(c) => (e.to.clone(), c),
                    EdgeKind::Composition => unreachable!(),
                })
                .collect();
            plugged.sort();
            found.push(PatternInstance {
                root: root.id.clone(),
                socket: socket.map(|s| s.id.clone()),
                isocket: isocket.id.clone(),
                plugged,
            });
        }
    }
    found.sort();
    found
}

fn arb_mods() -> impl Strategy<Value = Vec<ModOp>> {
    let op = prop_oneof![
        (arb_kind(), arb_name()).prop_map(|(k, name)| ModOp::Remove(k, name)),
        (arb_kind(), arb_name()).prop_map(|(k, name)| ModOp::Add(k, name)),
        (arb_kind(), arb_name()).prop_map(|(k, name)| ModOp::Restore(k, name)),
        arb_identity().prop_map(ModOp::SetIdentity),
    ];
    prop::collection::vec(op, 0..5)
}

fn arb_text_graph() -> impl Strategy<Value = OntologyGraph> {
    let node = (
        arb_name(),
        prop::sample::select(vec![
            NodeKind::Class,
            NodeKind::Socket,
            NodeKind::ISocket,
            NodeKind::PosClass,
            NodeKind::NegClass,
        ]),
        prop::option::of(prop_oneof![arb_quality(), Just(String::new())]),
    );
    (
        prop::collection::vec(node, 0..6),
        prop::collection::vec(
            (
                any::<Index>(),
                any::<Index>(),
                prop_oneof![Just(EdgeKind::Composition), (0u32..4).prop_map(EdgeKind::PluggedIn),],
            ),
            0..8,
        ),
    )
        .prop_map(|(raw, raw_edges)| {
            let mut seen = BTreeSet::new();
            let nodes: Vec<Node> = raw
                .into_iter()
                .filter(|(id, _, _)| seen.insert(id.clone()))
                .map(|(id, kind, label)| Node {
                    id: id.to_string(),
                    kind,
                    label,
                })
                .collect();
            let mut pairs = BTreeSet::new();
            let edges = if nodes.is_empty() {
                Vec::new()
            } else {
                raw_edges
                    .into_iter()
                    .map(|(a, b, kind)| Edge {
                        from: nodes[a.index(nodes.len())].id.clone(),
                        to: nodes[b.index(nodes.len())].id.clone(),
                        kind,
                    })
                    .filter(|e| pairs.insert((e.from.clone(), e.to.clone())))
                    .collect()
            };
            OntologyGraph::new(nodes, edges).unwrap()
        })
}

/// Documents with every item kind. Names are unique per kind and every
/// `from` names a built-in or document concept.
pub fn arb_document() -> impl Strategy<Value = Document> {
    let concepts = prop::collection::vec(arb_concept(), 0..3);
    let nonconcepts = prop::collection::vec((arb_name(), any::<Index>(), arb_mods()), 0..3);
    let intangibles = prop::collection::vec((arb_name(), arb_quality(), arb_quality()), 0..3);
    let lines = prop::collection::vec(
        (
            arb_name(),
            any::<Index>(),
            prop::collection::vec((arb_name(), arb_stage(), arb_mods()), 0..3),
        ),
        0..2,
    );
    let graphs = prop::collection::vec((arb_name(), arb_text_graph()), 0..2);
    (concepts, nonconcepts, intangibles, lines, graphs, any::<u64>()).prop_map(
        |(concepts, nonconcepts, intangibles, lines, graphs, shuffle)| {
            let mut taken: BTreeMap<&'static str, BTreeSet<ConceptName>> = BTreeMap::new();
            let mut fresh =
                |kind: &'static str, name: &ConceptName| taken.entry(kind).or_default().insert(name.clone());
            let mut items = Vec::new();

            let mut bases: Vec<ConceptName> = builtin_corpus().concepts().map(|c| c.name().clone()).collect();
            for concept in concepts {
                if fresh("concept", concept.name()) {
                    bases.push(concept.name().clone());
                    items.push(Item::Concept(concept));
                }
            }
            for (name, base, ops) in nonconcepts {
                if fresh("nonconcept", &name) {
                    let base = bases[base.index(bases.len())].clone();
                    items.push(Item::NonConcept(NonConceptDef {
                        name,
                        delta: Delta::new(base, ops),
                    }));
                }
            }
            for (term, pos, neg) in intangibles {
                if fresh("intangible", &term) {
                    if let Ok(spec) = IntangibleSpec::new(term, pos, neg) {
                        items.push(Item::Intangible(spec));
                    }
                }
            }
            for (name, base, raw) in lines {
                if fresh("productline", &name) {
                    let base = bases[base.index(bases.len())].clone();
                    let mut seen = BTreeSet::new();
                    let variants = raw
                        .into_iter()
                        .filter(|(v, _, _)| seen.insert(v.clone()))
                        .map(|(v, stage, ops)| Variant {
                            name: v,
                            delta: Delta::new(base.clone(), ops),
                            stage,
                        })
                        .collect();
                    items.push(Item::ProductLine(ProductLineDef {
                        name,
                        set: VariantSet::new(base, variants).unwrap(),
                    }));
                }
            }
            for (name, graph) in graphs {
                if fresh("graph", &name) {
                    items.push(Item::Graph(GraphDef { name, graph }));
                }
            }
            // Interleave item kinds; order is part of the document.
            let len = items.len();
            if len > 1 {
                items.rotate_left((shuffle as usize) % len);
                items.swap(0, (shuffle as usize / 7) % len);
            }
            Document::new(items)
        },
    )
}
