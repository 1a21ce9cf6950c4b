use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::Ontology;
use crate::error::{CategoryError, ElementKind, HomError};

/// An incidence- and tag-preserving pair of maps between two ontologies.
///
/// Maps are stored by element index (ontologies keep their elements in id
/// order), so pointwise equality of two homomorphisms is vector equality.
#[derive(Clone)]
pub struct Homomorphism {
    source: Arc<Ontology>,
    target: Arc<Ontology>,
    concept_map: Vec<usize>,
    relation_map: Vec<usize>,
}

/// Injectivity/surjectivity summary of a homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomKind {
    pub injective: bool,
    pub surjective: bool,
    /// Componentwise surjective.
    pub epic: bool,
    pub iso: bool,
}

fn same(a: &Arc<Ontology>, b: &Arc<Ontology>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Homomorphism {
    pub fn new(
        source: Arc<Ontology>,
        target: Arc<Ontology>,
        concept_map: Vec<usize>,
        relation_map: Vec<usize>,
    ) -> Result<Self, HomError> {
        let h = Homomorphism { source, target, concept_map, relation_map };
        h.check()?;
        Ok(h)
    }

    /// Builds from id-to-id maps. Every source element must be mapped.
    pub fn from_id_maps(
        source: Arc<Ontology>,
        target: Arc<Ontology>,
        concepts: &BTreeMap<String, String>,
        relations: &BTreeMap<String, String>,
    ) -> Result<Self, HomError> {
        for id in concepts.keys() {
            if source.concept_index(id).is_none() {
                return Err(HomError::UnknownElement { kind: ElementKind::Concept, id: id.clone() });
            }
        }
        for id in relations.keys() {
            if source.relation_index(id).is_none() {
                return Err(HomError::UnknownElement { kind: ElementKind::Relation, id: id.clone() });
            }
        }
        let mut concept_map = Vec::with_capacity(source.concept_count());
        for c in source.concepts() {
            let to = concepts
                .get(&c.id)
                .ok_or_else(|| HomError::NotTotal { kind: ElementKind::Concept, id: c.id.clone() })?;
            let j = target
                .concept_index(to)
                .ok_or_else(|| HomError::UnknownElement { kind: ElementKind::Concept, id: to.clone() })?;
            concept_map.push(j);
        }
        let mut relation_map = Vec::with_capacity(source.relation_count());
        for r in source.relations() {
            let to = relations
                .get(&r.id)
                .ok_or_else(|| HomError::NotTotal { kind: ElementKind::Relation, id: r.id.clone() })?;
            let j = target
                .relation_index(to)
                .ok_or_else(|| HomError::UnknownElement { kind: ElementKind::Relation, id: to.clone() })?;
            relation_map.push(j);
        }
        Homomorphism::new(source, target, concept_map, relation_map)
    }

    /// The identity on `o`.
    pub fn identity(o: Arc<Ontology>) -> Self {
        let concept_map = (0..o.concept_count()).collect();
        let relation_map = (0..o.relation_count()).collect();
        Homomorphism { source: o.clone(), target: o, concept_map, relation_map }
    }

    /// The unique map out of the empty ontology.
    pub fn from_empty(target: Arc<Ontology>) -> Self {
        Homomorphism { source: Arc::new(Ontology::empty()), target, concept_map: vec![], relation_map: vec![] }
    }

    pub(crate) fn new_unchecked(
        source: Arc<Ontology>,
        target: Arc<Ontology>,
        concept_map: Vec<usize>,
        relation_map: Vec<usize>,
    ) -> Self {
        let h = Homomorphism { source, target, concept_map, relation_map };
        debug_assert!(h.check().is_ok(), "{:?}", h.check());
        h
    }

    fn check(&self) -> Result<(), HomError> {
        let (s, t) = (&*self.source, &*self.target);
        if self.concept_map.len() != s.concept_count() {
            return Err(HomError::WrongArity { kind: ElementKind::Concept });
        }
        if self.relation_map.len() != s.relation_count() {
            return Err(HomError::WrongArity { kind: ElementKind::Relation });
        }
        for (i, &j) in self.concept_map.iter().enumerate() {
            if j >= t.concept_count() {
                return Err(HomError::UnknownElement { kind: ElementKind::Concept, id: j.to_string() });
            }
            if s.concept_tag(i) != t.concept_tag(j) {
                return Err(HomError::TagMismatch {
                    kind: ElementKind::Concept,
                    from: s.concept(i).id.clone(),
                    to: t.concept(j).id.clone(),
                    from_tag: s.concept(i).tag.clone(),
                    to_tag: t.concept(j).tag.clone(),
                });
            }
        }
        for (i, &j) in self.relation_map.iter().enumerate() {
            if j >= t.relation_count() {
                return Err(HomError::UnknownElement { kind: ElementKind::Relation, id: j.to_string() });
            }
            if s.relation_tag(i) != t.relation_tag(j) {
                return Err(HomError::TagMismatch {
                    kind: ElementKind::Relation,
                    from: s.relation(i).id.clone(),
                    to: t.relation(j).id.clone(),
                    from_tag: s.relation(i).tag.clone(),
                    to_tag: t.relation(j).tag.clone(),
                });
            }
            if self.concept_map[s.src(i)] != t.src(j) {
                return Err(HomError::IncidenceViolated { relation: s.relation(i).id.clone(), end: "src" });
            }
            if self.concept_map[s.dst(i)] != t.dst(j) {
                return Err(HomError::IncidenceViolated { relation: s.relation(i).id.clone(), end: "dst" });
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<Ontology> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Ontology> {
        &self.target
    }

    pub fn concept_map(&self) -> &[usize] {
        &self.concept_map
    }

    pub fn relation_map(&self) -> &[usize] {
        &self.relation_map
    }

    pub fn map_concept(&self, i: usize) -> usize {
        self.concept_map[i]
    }

    pub fn map_relation(&self, i: usize) -> usize {
        self.relation_map[i]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism, CategoryError> {
        compose_homs(self, next)
    }

    /// Same maps, re-targeted at an equal ontology (used to line up
    /// structurally equal `Arc`s without copying).
    pub fn with_target(&self, target: Arc<Ontology>) -> Result<Homomorphism, CategoryError> {
        if !same(&self.target, &target) {
            return Err(CategoryError::DomainMismatch("retargeted ontology differs"));
        }
        Ok(Homomorphism { target, ..self.clone() })
    }

    pub fn kind(&self) -> HomKind {
        let injective = is_injective(&self.concept_map) && is_injective(&self.relation_map);
        let surjective = covers(&self.concept_map, self.target.concept_count())
            && covers(&self.relation_map, self.target.relation_count());
        let iso = injective && surjective && self.inverse().is_some();
        HomKind { injective, surjective, epic: surjective, iso }
    }

    /// The inverse, when `self` is bijective and the inverse maps are again a
    /// homomorphism.
    pub fn inverse(&self) -> Option<Homomorphism> {
        if self.concept_map.len() != self.target.concept_count()
            || self.relation_map.len() != self.target.relation_count()
        {
            return None;
        }
        let mut cinv = vec![usize::MAX; self.concept_map.len()];
        for (i, &j) in self.concept_map.iter().enumerate() {
            if cinv[j] != usize::MAX {
                return None;
            }
            cinv[j] = i;
        }
        let mut rinv = vec![usize::MAX; self.relation_map.len()];
        for (i, &j) in self.relation_map.iter().enumerate() {
            if rinv[j] != usize::MAX {
                return None;
            }
            rinv[j] = i;
        }
        Homomorphism::new(self.target.clone(), self.source.clone(), cinv, rinv).ok()
    }

    /// Id-keyed view of the concept map.
    pub fn concept_id_map(&self) -> BTreeMap<String, String> {
        self.concept_map
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.source.concept(i).id.clone(), self.target.concept(j).id.clone()))
            .collect()
    }

    pub fn relation_id_map(&self) -> BTreeMap<String, String> {
        self.relation_map
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.source.relation(i).id.clone(), self.target.relation(j).id.clone()))
            .collect()
    }
}

fn is_injective(map: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(map.len());
    map.iter().all(|j| seen.insert(*j))
}

fn covers(map: &[usize], n: usize) -> bool {
    let mut hit = vec![false; n];
    map.iter().for_each(|&j| hit[j] = true);
    hit.into_iter().all(|b| b)
}

/// Pointwise composite: `first` then `second`.
pub fn compose_homs(first: &Homomorphism, second: &Homomorphism) -> Result<Homomorphism, CategoryError> {
    if !same(&first.target, &second.source) {
        return Err(CategoryError::DomainMismatch("first.target != second.source"));
    }
    let concept_map = first.concept_map.iter().map(|&j| second.concept_map[j]).collect();
    let relation_map = first.relation_map.iter().map(|&j| second.relation_map[j]).collect();
    Ok(Homomorphism { source: first.source.clone(), target: second.target.clone(), concept_map, relation_map })
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.concept_map == other.concept_map
            && self.relation_map == other.relation_map
            && same(&self.source, &other.source)
            && same(&self.target, &other.target)
    }
}

impl Eq for Homomorphism {}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Homomorphism")
            .field("concepts", &self.concept_id_map())
            .field("relations", &self.relation_id_map())
            .finish()
    }
}
