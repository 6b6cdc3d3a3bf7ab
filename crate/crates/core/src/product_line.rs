//! Product lines: one base concept, many named variant deltas, each tagged
//! with the stage at which it is applied.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::delta::{evaluate, Delta, DeltaError, MemberState, Outcome};
use crate::model::{ConceptName, MemberKind};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Design,
    Manufacturing,
    Delivery,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Design, Stage::Manufacturing, Stage::Delivery];

    pub fn keyword(self) -> &'static str {
        match self {
            Stage::Design => "design",
            Stage::Manufacturing => "manufacturing",
            Stage::Delivery => "delivery",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductLineError {
    #[error("duplicate variant {0}")]
    DuplicateVariant(ConceptName),
    #[error("variant {variant} targets {found}, not the product line base {expected}")]
    BaseMismatch {
        variant: ConceptName,
        expected: ConceptName,
        found: ConceptName,
    },
    #[error("unknown base concept {0}")]
    UnknownBase(ConceptName),
    #[error("variant {variant}: {source}")]
    Variant { variant: ConceptName, source: DeltaError },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variant {
    pub name: ConceptName,
    pub delta: Delta,
    pub stage: Stage,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariantSet {
    base: ConceptName,
    variants: Vec<Variant>,
}

impl VariantSet {
    pub fn new(base: ConceptName, variants: Vec<Variant>) -> Result<Self, ProductLineError> {
        let mut names = BTreeSet::new();
        for variant in &variants {
            if !names.insert(&variant.name) {
                return Err(ProductLineError::DuplicateVariant(variant.name.clone()));
            }
            if variant.delta.base != base {
                return Err(ProductLineError::BaseMismatch {
                    variant: variant.name.clone(),
                    expected: base,
                    found: variant.delta.base.clone(),
                });
            }
        }
        Ok(VariantSet { base, variants })
    }

    pub fn base(&self) -> &ConceptName {
        &self.base
    }

    pub fn variants(&self) -> &[Variant] {
        &self.variants
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }
}

/// Per-variant results keyed by variant name.
pub type Expansion = BTreeMap<ConceptName, Outcome>;

/// Classifies every variant and derives the ontology of each Non-concept
/// variant. A variant that breaks the base's identity is recorded with its
/// breakdown; it does not stop the expansion.
pub fn expand(registry: &Registry, set: &VariantSet) -> Result<Expansion, ProductLineError> {
    let base = registry
        .get(set.base().as_str())
        .ok_or_else(|| ProductLineError::UnknownBase(set.base().clone()))?;
    set.variants()
        .iter()
        .map(|variant| {
            evaluate(base, &variant.delta)
                .map(|outcome| (variant.name.clone(), outcome))
                .map_err(|source| ProductLineError::Variant {
                    variant: variant.name.clone(),
                    source,
                })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StageEntry {
    pub variant: ConceptName,
    pub stage: Stage,
    pub state: MemberState,
}

/// For each touched member, which variants touch it, when, and how.
pub type StageReport = BTreeMap<(MemberKind, ConceptName), Vec<StageEntry>>;

/// Inverts an expansion. Rows are ordered by (kind, member) and the entries
/// of a row by variant name.
pub fn stage_report(registry: &Registry, set: &VariantSet) -> Result<StageReport, ProductLineError> {
    let expansion = expand(registry, set)?;
    let stages: BTreeMap<&ConceptName, Stage> = set.variants().iter().map(|v| (&v.name, v.stage)).collect();

    let mut report = StageReport::new();
    for (variant, outcome) in &expansion {
        for member in outcome.effect.touched() {
            report
                .entry((member.kind, member.name.clone()))
                .or_default()
                .push(StageEntry {
                    variant: variant.clone(),
                    stage: stages[variant],
                    state: member.state,
                });
        }
    }
    Ok(report)
}
