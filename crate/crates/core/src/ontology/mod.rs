//! Finite ontology structures: concepts joined by binary, optionally tagged
//! relation edges.
//!
//! Concepts and relations are kept sorted by id, so the position of an
//! element is a stable index used by every algorithm in the crate. Tags
//! constrain homomorphisms (exact match, untagged only to untagged); labels
//! are display metadata and never take part in any mathematical operation.

mod canon;
mod hom;
mod search;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use canon::{are_isomorphic, canonical_form, canonical_labeling, isomorphism, CanonicalKey, CanonicalLabeling};
pub use hom::{compose_homs, HomKind, Homomorphism};
pub use search::{find_homomorphisms, HomSearch, SearchMode, SearchOutcome, DEFAULT_HOM_BUDGET};

use crate::error::{ValidationError, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Concept {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Concept {
    pub fn new(id: impl Into<String>, tag: Option<&str>) -> Self {
        Concept { id: id.into(), tag: tag.map(str::to_owned), label: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relation {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub src: String,
    pub dst: String,
}

impl Relation {
    pub fn new(id: impl Into<String>, tag: Option<&str>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        Relation { id: id.into(), tag: tag.map(str::to_owned), label: None, src: src.into(), dst: dst.into() }
    }
}

/// Unvalidated ontology data, as read from a file or assembled by hand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOntology {
    #[serde(default)]
    pub concepts: Vec<Concept>,
    #[serde(default)]
    pub relations: Vec<Relation>,
}

/// A validated finite ontology.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ontology {
    concepts: Vec<Concept>,
    relations: Vec<Relation>,
    src: Vec<usize>,
    dst: Vec<usize>,
}

/// Checks ids and endpoints and returns the ontology in id order.
pub fn validate(raw: RawOntology) -> Result<Ontology, ValidationError> {
    let RawOntology { mut concepts, mut relations } = raw;
    let mut violations = Vec::new();

    let mut seen = BTreeSet::new();
    for c in &concepts {
        if !seen.insert(c.id.as_str()) {
            violations.push(Violation::DuplicateConceptId(c.id.clone()));
        }
    }
    let mut seen_rel = BTreeSet::new();
    for r in &relations {
        if !seen_rel.insert(r.id.as_str()) {
            violations.push(Violation::DuplicateRelationId(r.id.clone()));
        }
        if !seen.contains(r.src.as_str()) {
            violations.push(Violation::DanglingSrc { relation: r.id.clone(), concept: r.src.clone() });
        }
        if !seen.contains(r.dst.as_str()) {
            violations.push(Violation::DanglingDst { relation: r.id.clone(), concept: r.dst.clone() });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationError { violations });
    }

    concepts.sort_by(|a, b| a.id.cmp(&b.id));
    relations.sort_by(|a, b| a.id.cmp(&b.id));
    let index = |id: &str| concepts.binary_search_by(|c| c.id.as_str().cmp(id)).expect("validated endpoint");
    let src = relations.iter().map(|r| index(&r.src)).collect();
    let dst = relations.iter().map(|r| index(&r.dst)).collect();
    Ok(Ontology { concepts, relations, src, dst })
}

impl Ontology {
    /// The empty ontology, the initial object.
    pub fn empty() -> Self {
        Ontology { concepts: Vec::new(), relations: Vec::new(), src: Vec::new(), dst: Vec::new() }
    }

    pub fn builder() -> OntologyBuilder {
        OntologyBuilder::default()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn concept(&self, i: usize) -> &Concept {
        &self.concepts[i]
    }

    pub fn relation(&self, i: usize) -> &Relation {
        &self.relations[i]
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// Concepts plus relations.
    pub fn element_count(&self) -> usize {
        self.concepts.len() + self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.relations.is_empty()
    }

    /// Index of the source concept of relation `r`.
    pub fn src(&self, r: usize) -> usize {
        self.src[r]
    }

    pub fn dst(&self, r: usize) -> usize {
        self.dst[r]
    }

    pub fn concept_tag(&self, i: usize) -> Option<&str> {
        self.concepts[i].tag.as_deref()
    }

    pub fn relation_tag(&self, i: usize) -> Option<&str> {
        self.relations[i].tag.as_deref()
    }

    pub fn concept_index(&self, id: &str) -> Option<usize> {
        self.concepts.binary_search_by(|c| c.id.as_str().cmp(id)).ok()
    }

    pub fn relation_index(&self, id: &str) -> Option<usize> {
        self.relations.binary_search_by(|r| r.id.as_str().cmp(id)).ok()
    }

    pub fn to_raw(&self) -> RawOntology {
        RawOntology { concepts: self.concepts.clone(), relations: self.relations.clone() }
    }

    /// Returns a copy with every id (and endpoint reference) rewritten by `f`.
    /// Fails only if `f` is not injective on the ids it sees.
    pub fn rename_ids(&self, mut f: impl FnMut(&str) -> String) -> Result<Ontology, ValidationError> {
        let concepts: Vec<Concept> = self.concepts.iter().map(|c| Concept { id: f(&c.id), ..c.clone() }).collect();
        let relations = self
            .relations
            .iter()
            .enumerate()
            .map(|(i, r)| Relation {
                id: f(&r.id),
                src: concepts[self.src[i]].id.clone(),
                dst: concepts[self.dst[i]].id.clone(),
                ..r.clone()
            })
            .collect();
        validate(RawOntology { concepts, relations })
    }

    /// Drops all labels.
    pub fn without_labels(&self) -> Ontology {
        let mut o = self.clone();
        o.concepts.iter_mut().for_each(|c| c.label = None);
        o.relations.iter_mut().for_each(|r| r.label = None);
        o
    }
}

impl Default for Ontology {
    fn default() -> Self {
        Ontology::empty()
    }
}

/// Convenience builder used by fixtures and tests.
#[derive(Debug, Default, Clone)]
pub struct OntologyBuilder {
    raw: RawOntology,
}

impl OntologyBuilder {
    pub fn concept(mut self, id: &str, tag: Option<&str>) -> Self {
        self.raw.concepts.push(Concept::new(id, tag));
        self
    }

    pub fn labeled_concept(mut self, id: &str, tag: Option<&str>, label: &str) -> Self {
        let mut c = Concept::new(id, tag);
        c.label = Some(label.to_owned());
        self.raw.concepts.push(c);
        self
    }

    pub fn relation(mut self, id: &str, tag: Option<&str>, src: &str, dst: &str) -> Self {
        self.raw.relations.push(Relation::new(id, tag, src, dst));
        self
    }

    pub fn build(self) -> Result<Ontology, ValidationError> {
        validate(self.raw)
    }
}
