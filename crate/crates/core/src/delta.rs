//! Modification deltas: applying them to a base concept, classifying the
//! outcome and deriving the pluggable ontology.
//!
//! Ops are processed in order and the last op on a member wins. Removing a
//! part (or property) that a functionality requires also removes the
//! functionality, unless the functionality is restored afterwards.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{
    BaseConcept, Cardinality, ConceptName, ISocket, IdentityLabel, MemberKind, ModelError, PluggableOntology,
    PluggedEntry, Socket,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModOp {
    Remove(MemberKind, ConceptName),
    Add(MemberKind, ConceptName),
    /// Puts a removed or added member back to its original state.
    Restore(MemberKind, ConceptName),
    SetIdentity(IdentityLabel),
}

impl ModOp {
    pub fn remove_part(name: ConceptName) -> Self {
        ModOp::Remove(MemberKind::Part, name)
    }

    pub fn add_part(name: ConceptName) -> Self {
        ModOp::Add(MemberKind::Part, name)
    }

    pub fn remove_functionality(name: ConceptName) -> Self {
        ModOp::Remove(MemberKind::Functionality, name)
    }

    pub fn add_functionality(name: ConceptName) -> Self {
        ModOp::Add(MemberKind::Functionality, name)
    }

    pub fn remove_property(name: ConceptName) -> Self {
        ModOp::Remove(MemberKind::Property, name)
    }

    pub fn add_property(name: ConceptName) -> Self {
        ModOp::Add(MemberKind::Property, name)
    }

    /// The member this op touches, if any.
    pub fn member(&self) -> Option<(MemberKind, &ConceptName)> {
        match self {
            ModOp::Remove(kind, name) | ModOp::Add(kind, name) | ModOp::Restore(kind, name) => Some((*kind, name)),
            ModOp::SetIdentity(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Delta {
    pub base: ConceptName,
    pub ops: Vec<ModOp>,
}

impl Delta {
    pub fn new(base: ConceptName, ops: Vec<ModOp>) -> Self {
        Delta { base, ops }
    }

    pub fn empty(base: ConceptName) -> Self {
        Delta { base, ops: Vec::new() }
    }

    pub fn identities(&self) -> impl Iterator<Item = &IdentityLabel> {
        self.ops.iter().filter_map(|op| match op {
            ModOp::SetIdentity(label) => Some(label),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemberState {
    Removed,
    Added,
    Untouched,
}

impl MemberState {
    pub fn cardinality(self) -> Option<Cardinality> {
        match self {
            MemberState::Removed => Some(Cardinality::Zero),
            MemberState::Added => Some(Cardinality::One),
            MemberState::Untouched => None,
        }
    }
}

impl fmt::Display for MemberState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemberState::Removed => "removed",
            MemberState::Added => "added",
            MemberState::Untouched => "untouched",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MemberStatus {
    pub kind: MemberKind,
    pub name: ConceptName,
    pub state: MemberState,
    /// False for members introduced by an `Add` op.
    pub in_base: bool,
}

/// Result of [`apply`]: every base member plus every member introduced by
/// the delta, in base declaration order followed by first-add order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EffectiveState {
    members: Vec<MemberStatus>,
}

impl EffectiveState {
    pub fn members(&self) -> &[MemberStatus] {
        &self.members
    }

    pub fn state(&self, kind: MemberKind, name: &str) -> Option<MemberState> {
        self.members
            .iter()
            .find(|m| m.kind == kind && m.name.as_str() == name)
            .map(|m| m.state)
    }

    /// Members whose state is not `Untouched`.
    pub fn touched(&self) -> impl Iterator<Item = &MemberStatus> {
        self.members.iter().filter(|m| m.state != MemberState::Untouched)
    }

    pub fn is_untouched(&self) -> bool {
        self.touched().next().is_none()
    }

    /// Touched members keyed by (kind, name).
    pub fn touched_map(&self) -> BTreeMap<(MemberKind, ConceptName), MemberState> {
        self.touched().map(|m| ((m.kind, m.name.clone()), m.state)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Classification {
    Original,
    NonConcept,
    /// An essential part was removed; the concept is no longer recognizable.
    IdentityBreakdown(ConceptName),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Original => f.write_str("original"),
            Classification::NonConcept => f.write_str("nonconcept"),
            Classification::IdentityBreakdown(cause) => write!(f, "identity-breakdown {cause}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeltaError {
    #[error("delta targets {found} but was applied to {expected}")]
    BaseMismatch { expected: ConceptName, found: ConceptName },
    #[error("unknown {kind} {name}")]
    UnknownMember { kind: MemberKind, name: ConceptName },
    #[error("cannot restore {kind} {name}: it was never removed or added")]
    RestoreOfUntouched { kind: MemberKind, name: ConceptName },
    #[error("cannot add {requested} {name}: it is already a {existing}")]
    KindConflict {
        name: ConceptName,
        existing: MemberKind,
        requested: MemberKind,
    },
    #[error("no pluggable ontology for a concept classified as {0}")]
    CannotDerive(Classification),
    #[error("the Non- token is already implied and cannot be set twice")]
    DuplicateNon,
}

struct Slot {
    kind: MemberKind,
    name: ConceptName,
    in_base: bool,
    /// Indices of the members a functionality requires.
    requires: Vec<usize>,
    /// Op index and state of the last explicit op on this member.
    last: Option<(usize, MemberState)>,
    /// Op index of the last restore of this member.
    restored_at: Option<usize>,
}

struct Tracker {
    slots: Vec<Slot>,
}

impl Tracker {
    fn new(base: &BaseConcept) -> Self {
        let mut slots: Vec<Slot> = base
            .members()
            .map(|(kind, name)| Slot {
                kind,
                name: name.clone(),
                in_base: true,
                requires: Vec::new(),
                last: None,
                restored_at: None,
            })
            .collect();
        for functionality in base.functionalities() {
            let requires = functionality
                .requires
                .iter()
                .filter_map(|r| {
                    slots
                        .iter()
                        .position(|s| s.kind != MemberKind::Functionality && &s.name == r)
                })
                .collect();
            let index = slots
                .iter()
                .position(|s| s.kind == MemberKind::Functionality && s.name == functionality.name)
                .expect("functionality is a member");
            slots[index].requires = requires;
        }
        Tracker { slots }
    }

    fn find(&self, name: &ConceptName) -> Option<usize> {
        self.slots.iter().position(|s| &s.name == name)
    }

    /// Index of `name` as a member of `kind`, or `UnknownMember`.
    fn resolve(&self, kind: MemberKind, name: &ConceptName) -> Result<usize, DeltaError> {
        self.find(name)
            .filter(|&i| self.slots[i].kind == kind)
            .ok_or_else(|| DeltaError::UnknownMember {
                kind,
                name: name.clone(),
            })
    }

    fn explicit(&self, index: usize) -> MemberState {
        self.slots[index]
            .last
            .map_or(MemberState::Untouched, |(_, state)| state)
    }

    fn state(&self, index: usize) -> MemberState {
        let slot = &self.slots[index];
        let propagated_at = slot
            .requires
            .iter()
            .filter(|&&r| self.explicit(r) == MemberState::Removed)
            .filter_map(|&r| self.slots[r].last.map(|(at, _)| at))
            .max();
        match propagated_at {
            Some(removed_at) if slot.restored_at.is_none_or(|at| at < removed_at) => MemberState::Removed,
            _ => self.explicit(index),
        }
    }

    fn step(&mut self, at: usize, op: &ModOp) -> Result<(), DeltaError> {
        match op {
            ModOp::Remove(kind, name) => {
                let index = self.resolve(*kind, name)?;
                self.slots[index].last = Some((at, MemberState::Removed));
            }
            ModOp::Add(kind, name) => match self.find(name) {
                Some(index) if self.slots[index].kind != *kind => {
                    return Err(DeltaError::KindConflict {
                        name: name.clone(),
                        existing: self.slots[index].kind,
                        requested: *kind,
                    });
                }
                Some(index) => self.slots[index].last = Some((at, MemberState::Added)),
                None => self.slots.push(Slot {
                    kind: *kind,
                    name: name.clone(),
                    in_base: false,
                    requires: Vec::new(),
                    last: Some((at, MemberState::Added)),
                    restored_at: None,
                }),
            },
            ModOp::Restore(kind, name) => {
                let index = self.resolve(*kind, name)?;
                if self.state(index) == MemberState::Untouched {
                    return Err(DeltaError::RestoreOfUntouched {
                        kind: *kind,
                        name: name.clone(),
                    });
                }
                self.slots[index].last = Some((at, MemberState::Untouched));
                self.slots[index].restored_at = Some(at);
            }
            ModOp::SetIdentity(_) => {}
        }
        Ok(())
    }

    fn finish(self) -> EffectiveState {
        let members = (0..self.slots.len())
            .map(|i| {
                let slot = &self.slots[i];
                MemberStatus {
                    kind: slot.kind,
                    name: slot.name.clone(),
                    state: self.state(i),
                    in_base: slot.in_base,
                }
            })
            .collect();
        EffectiveState { members }
    }
}

fn check_base(base: &BaseConcept, delta: &Delta) -> Result<(), DeltaError> {
    if &delta.base != base.name() {
        return Err(DeltaError::BaseMismatch {
            expected: base.name().clone(),
            found: delta.base.clone(),
        });
    }
    Ok(())
}

/// Runs the delta's ops against `base` and returns the state of every
/// member.
pub fn apply(base: &BaseConcept, delta: &Delta) -> Result<EffectiveState, DeltaError> {
    check_base(base, delta)?;
    let mut tracker = Tracker::new(base);
    for (at, op) in delta.ops.iter().enumerate() {
        tracker.step(at, op)?;
    }
    Ok(tracker.finish())
}

fn classify_effect(base: &BaseConcept, delta: &Delta, effect: &EffectiveState) -> Classification {
    let broken = base
        .parts()
        .iter()
        .filter(|p| p.essential)
        .find(|p| effect.state(MemberKind::Part, p.name.as_str()) == Some(MemberState::Removed));
    if let Some(part) = broken {
        return Classification::IdentityBreakdown(part.name.clone());
    }
    if effect.is_untouched() && delta.identities().next().is_none() {
        Classification::Original
    } else {
        Classification::NonConcept
    }
}

pub fn classify(base: &BaseConcept, delta: &Delta) -> Result<Classification, DeltaError> {
    let effect = apply(base, delta)?;
    Ok(classify_effect(base, delta, &effect))
}

/// Everything the engine learns from one delta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub effect: EffectiveState,
    pub classification: Classification,
    /// Present only for `NonConcept`.
    pub ontology: Option<PluggableOntology>,
}

/// Applies, classifies and, when the result is a Non-concept, derives.
/// Only apply errors and `DuplicateNon` are reported as errors.
pub fn evaluate(base: &BaseConcept, delta: &Delta) -> Result<Outcome, DeltaError> {
    let effect = apply(base, delta)?;
    if delta.identities().any(IdentityLabel::is_non) {
        return Err(DeltaError::DuplicateNon);
    }
    let classification = classify_effect(base, delta, &effect);
    let ontology = match classification {
        Classification::NonConcept => Some(build(base, delta, &effect)?),
        _ => None,
    };
    Ok(Outcome {
        effect,
        classification,
        ontology,
    })
}

/// Derives the pluggable ontology of a Non-concept.
///
/// The socket holds one entry per removed (cardinality 0) or added
/// (cardinality 1) member; untouched members are left out. The isocket
/// holds `Non-` followed by every identity the delta sets.
pub fn derive(base: &BaseConcept, delta: &Delta) -> Result<PluggableOntology, DeltaError> {
    let outcome = evaluate(base, delta)?;
    outcome.ontology.ok_or(DeltaError::CannotDerive(outcome.classification))
}

fn build(base: &BaseConcept, delta: &Delta, effect: &EffectiveState) -> Result<PluggableOntology, DeltaError> {
    let socket: Socket = effect
        .touched()
        .filter_map(|m| {
            m.state
                .cardinality()
                .map(|c| PluggedEntry::new(m.name.clone(), m.kind, c))
        })
        .collect();

    let mut isocket = ISocket::non();
    for label in delta.identities() {
        isocket = isocket.push(label.clone()).map_err(|_| DeltaError::DuplicateNon)?;
    }

    PluggableOntology::new(base.name().clone(), socket, isocket, None).map_err(|e| match e {
        ModelError::DuplicateNon => DeltaError::DuplicateNon,
        other => unreachable!("derived ontology violates a model invariant: {other}"),
    })
}

/// Member-state differences between two deltas over the same base.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeltaDiff {
    pub only_a: Vec<(MemberKind, ConceptName, MemberState)>,
    pub only_b: Vec<(MemberKind, ConceptName, MemberState)>,
    /// (kind, name, state in a, state in b)
    pub changed: Vec<(MemberKind, ConceptName, MemberState, MemberState)>,
}

impl DeltaDiff {
    pub fn is_empty(&self) -> bool {
        self.only_a.is_empty() && self.only_b.is_empty() && self.changed.is_empty()
    }
}

/// Compares the effective states of two deltas, not their op lists.
/// Untouched members count as absent. All three lists are sorted by
/// (kind, name).
pub fn diff(base: &BaseConcept, a: &Delta, b: &Delta) -> Result<DeltaDiff, DeltaError> {
    if a.base != b.base {
        return Err(DeltaError::BaseMismatch {
            expected: a.base.clone(),
            found: b.base.clone(),
        });
    }
    let left = apply(base, a)?.touched_map();
    let right = apply(base, b)?.touched_map();

    let mut out = DeltaDiff::default();
    for ((kind, name), state) in &left {
        match right.get(&(*kind, name.clone())) {
            None => out.only_a.push((*kind, name.clone(), *state)),
            Some(other) if other != state => out.changed.push((*kind, name.clone(), *state, *other)),
            Some(_) => {}
        }
    }
    for ((kind, name), state) in &right {
        if !left.contains_key(&(*kind, name.clone())) {
            out.only_b.push((*kind, name.clone(), *state));
        }
    }
    Ok(out)
}
