//! Registry of base concepts, including the built-in corpus.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{BaseConcept, ConceptName, FunctionalitySpec, PartSpec, PropertySpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("a concept named {0} is already registered")]
    NameCollision(ConceptName),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    concepts: BTreeMap<ConceptName, BaseConcept>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// Returns a registry that also holds `concept`. An existing concept of
    /// the same name is only replaced when `override_existing` is set.
    pub fn register(&self, concept: BaseConcept, override_existing: bool) -> Result<Registry, RegistryError> {
        if !override_existing && self.concepts.contains_key(concept.name()) {
            return Err(RegistryError::NameCollision(concept.name().clone()));
        }
        let mut concepts = self.concepts.clone();
        concepts.insert(concept.name().clone(), concept);
        Ok(Registry { concepts })
    }

    pub fn get(&self, name: &str) -> Option<&BaseConcept> {
        self.concepts.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    /// Concepts ordered by name.
    pub fn concepts(&self) -> impl Iterator<Item = &BaseConcept> {
        self.concepts.values()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

fn n(text: &str) -> ConceptName {
    ConceptName::new(text).expect("corpus names are valid")
}

fn part(text: &str) -> PartSpec {
    PartSpec::new(n(text))
}

fn functionality(text: &str, requires: &[&str]) -> FunctionalitySpec {
    FunctionalitySpec::requiring(n(text), requires.iter().map(|r| n(r)))
}

fn property(text: &str) -> PropertySpec {
    PropertySpec::new(n(text))
}

fn concept(
    name: &str,
    parts: Vec<PartSpec>,
    functionalities: Vec<FunctionalitySpec>,
    properties: Vec<PropertySpec>,
) -> BaseConcept {
    BaseConcept::new(n(name), parts, functionalities, properties).expect("corpus concepts are valid")
}

/// The concepts behind the worked examples: Clock, Printer, Car, Pipe,
/// Apple and Person.
///
/// Dependencies come from what each example loses when a member goes away
/// (no battery, no periodicity; no 3-dimensions, no smoking). Scale is the
/// only essential part: a clock face without its scale is no longer
/// recognizable as a clock.
pub fn builtin_corpus() -> Registry {
    let concepts = [
        concept(
            "Clock",
            vec![part("Battery"), part("SynchPart"), PartSpec::essential(n("Scale"))],
            vec![
                functionality("Periodicity", &["Battery"]),
                functionality("Adjustability", &["Scale"]),
                functionality("Synchronization", &["SynchPart"]),
            ],
            vec![],
        ),
        // Printing works with either toner, so it depends on neither.
        concept(
            "Printer",
            vec![part("StandardToner"), part("DowngradedToner")],
            vec![functionality("Printing", &[])],
            vec![],
        ),
        // A car without its engine is still a (non-)car, so Engine is not
        // essential.
        concept(
            "Car",
            vec![part("Battery"), part("Engine")],
            vec![functionality("Driving", &["Battery"])],
            vec![],
        ),
        concept(
            "Pipe",
            vec![],
            vec![functionality("Smoking", &["ThreeDimensions"])],
            vec![property("ThreeDimensions"), property("TwoDimensions")],
        ),
        concept(
            "Apple",
            vec![part("FruitImage")],
            vec![functionality("Edibility", &[])],
            vec![
                property("ThreeDimensions"),
                property("TwoDimensions"),
                property("StylizedImage"),
            ],
        ),
        concept(
            "Person",
            vec![],
            vec![],
            vec![
                property("ThreeDimensions"),
                property("TwoDimensions"),
                property("Servant"),
                property("WithoutPersonalName"),
            ],
        ),
    ];
    Registry {
        concepts: concepts.into_iter().map(|c| (c.name().clone(), c)).collect(),
    }
}
