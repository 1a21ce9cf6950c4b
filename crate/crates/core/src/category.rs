//! V-alignment pairs and the constructions built on them: pushouts,
//! pullbacks, coproducts, mediating morphisms, induced merge morphisms and
//! alignment derivation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use crate::error::CategoryError;
use crate::ontology::{validate, Concept, Homomorphism, Ontology, RawOntology, Relation};
use crate::union_find::UnionFind;

/// A base ontology with two homomorphisms out of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VAlignmentPair {
    left: Homomorphism,
    right: Homomorphism,
}

/// The element pairs `(r1(b), r2(b))` induced by an alignment pair. The
/// pushout depends on nothing else.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Correspondence {
    pub concepts: BTreeSet<(usize, usize)>,
    pub relations: BTreeSet<(usize, usize)>,
}

impl Correspondence {
    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.relations.is_empty()
    }

    pub fn transpose(&self) -> Correspondence {
        Correspondence {
            concepts: self.concepts.iter().map(|&(a, b)| (b, a)).collect(),
            relations: self.relations.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    pub fn union_with(&mut self, other: &Correspondence) {
        self.concepts.extend(other.concepts.iter().copied());
        self.relations.extend(other.relations.iter().copied());
    }

    pub fn is_subset(&self, other: &Correspondence) -> bool {
        self.concepts.is_subset(&other.concepts) && self.relations.is_subset(&other.relations)
    }

    /// Diagonal of `o`.
    pub fn identity(o: &Ontology) -> Correspondence {
        Correspondence {
            concepts: (0..o.concept_count()).map(|i| (i, i)).collect(),
            relations: (0..o.relation_count()).map(|i| (i, i)).collect(),
        }
    }

    /// Realizes the correspondence as an alignment pair whose base is the
    /// relation itself: one base concept per concept pair, one base relation
    /// per relation pair. Fails if a pair mixes tags or a relation pair's
    /// endpoints are not themselves paired.
    pub fn to_pair(&self, left: &Arc<Ontology>, right: &Arc<Ontology>) -> Result<VAlignmentPair, CategoryError> {
        let concept_ids: BTreeMap<(usize, usize), String> =
            self.concepts.iter().map(|&(a, b)| ((a, b), pair_id(&left.concept(a).id, &right.concept(b).id))).collect();
        let concept_ids = dedup_ids(concept_ids, "c");
        let relation_ids = dedup_ids(
            self.relations
                .iter()
                .map(|&(a, b)| ((a, b), pair_id(&left.relation(a).id, &right.relation(b).id)))
                .collect(),
            "r",
        );
        let mut raw = RawOntology::default();
        for (&(a, b), id) in &concept_ids {
            let c = Concept { id: id.clone(), tag: left.concept(a).tag.clone(), label: None };
            raw.concepts.push(c);
            if left.concept_tag(a) != right.concept_tag(b) {
                return Err(CategoryError::DomainMismatch("correspondence pairs concepts with different tags"));
            }
        }
        for (&(a, b), id) in &relation_ids {
            let ends = |f: fn(&Ontology, usize) -> usize| concept_ids.get(&(f(left, a), f(right, b))).cloned();
            let (Some(src), Some(dst)) = (ends(Ontology::src), ends(Ontology::dst)) else {
                return Err(CategoryError::DomainMismatch("relation pair endpoints are not paired"));
            };
            if left.relation_tag(a) != right.relation_tag(b) {
                return Err(CategoryError::DomainMismatch("correspondence pairs relations with different tags"));
            }
            raw.relations.push(Relation { id: id.clone(), tag: left.relation(a).tag.clone(), label: None, src, dst });
        }
        let base = Arc::new(validate(raw).expect("correspondence base is well formed"));
        // base elements are in id order; map back through the id tables
        let mut lc = vec![0; base.concept_count()];
        let mut rc = vec![0; base.concept_count()];
        for (&(a, b), id) in &concept_ids {
            let i = base.concept_index(id).expect("base concept");
            lc[i] = a;
            rc[i] = b;
        }
        let mut lr = vec![0; base.relation_count()];
        let mut rr = vec![0; base.relation_count()];
        for (&(a, b), id) in &relation_ids {
            let i = base.relation_index(id).expect("base relation");
            lr[i] = a;
            rr[i] = b;
        }
        let l = Homomorphism::new(base.clone(), left.clone(), lc, lr)?;
        let r = Homomorphism::new(base, right.clone(), rc, rr)?;
        VAlignmentPair::new(l, r)
    }
}

fn pair_id(a: &str, b: &str) -> String {
    format!("{a}|{b}")
}

/// Pair ids may collide when ids contain `|`; fall back to positional ids.
fn dedup_ids(ids: BTreeMap<(usize, usize), String>, prefix: &str) -> BTreeMap<(usize, usize), String> {
    let distinct: HashSet<&String> = ids.values().collect();
    if distinct.len() == ids.len() {
        return ids;
    }
    ids.into_keys().map(|(a, b)| ((a, b), format!("{prefix}{a}.{b}"))).collect()
}

impl VAlignmentPair {
    pub fn new(left: Homomorphism, right: Homomorphism) -> Result<Self, CategoryError> {
        let same = Arc::ptr_eq(left.source(), right.source()) || left.source() == right.source();
        if !same {
            return Err(CategoryError::DomainMismatch("alignment legs have different bases"));
        }
        Ok(VAlignmentPair { left, right })
    }

    /// `(1_O, 1_O)`.
    pub fn reflexive(o: Arc<Ontology>) -> Self {
        let id = Homomorphism::identity(o);
        VAlignmentPair { left: id.clone(), right: id }
    }

    /// The pair over the empty base.
    pub fn over_empty(left: Arc<Ontology>, right: Arc<Ontology>) -> Self {
        let base = Arc::new(Ontology::empty());
        let l = Homomorphism::new_unchecked(base.clone(), left, Vec::new(), Vec::new());
        let r = Homomorphism::new_unchecked(base, right, Vec::new(), Vec::new());
        VAlignmentPair { left: l, right: r }
    }

    pub fn base(&self) -> &Arc<Ontology> {
        self.left.source()
    }

    pub fn left(&self) -> &Homomorphism {
        &self.left
    }

    pub fn right(&self) -> &Homomorphism {
        &self.right
    }

    pub fn left_target(&self) -> &Arc<Ontology> {
        self.left.target()
    }

    pub fn right_target(&self) -> &Arc<Ontology> {
        self.right.target()
    }

    pub fn swapped(&self) -> VAlignmentPair {
        VAlignmentPair { left: self.right.clone(), right: self.left.clone() }
    }

    pub fn correspondence(&self) -> Correspondence {
        let base = self.base();
        Correspondence {
            concepts: (0..base.concept_count())
                .map(|b| (self.left.map_concept(b), self.right.map_concept(b)))
                .collect(),
            relations: (0..base.relation_count())
                .map(|b| (self.left.map_relation(b), self.right.map_relation(b)))
                .collect(),
        }
    }
}

/// A triple `(f: B→B', f1: O1→O1', f2: O2→O2')` commuting with two pairs.
#[derive(Debug, Clone)]
pub struct AlignmentPairHom {
    pub base_map: Homomorphism,
    pub left_map: Homomorphism,
    pub right_map: Homomorphism,
}

impl AlignmentPairHom {
    pub fn new(
        from: &VAlignmentPair,
        to: &VAlignmentPair,
        base_map: Homomorphism,
        left_map: Homomorphism,
        right_map: Homomorphism,
    ) -> Result<Self, CategoryError> {
        let lhs = from.left().then(&left_map)?;
        let rhs = base_map.then(to.left())?;
        if lhs != rhs {
            return Err(CategoryError::DomainMismatch("left square does not commute"));
        }
        let lhs = from.right().then(&right_map)?;
        let rhs = base_map.then(to.right())?;
        if lhs != rhs {
            return Err(CategoryError::DomainMismatch("right square does not commute"));
        }
        Ok(AlignmentPairHom { base_map, left_map, right_map })
    }
}

#[derive(Debug, Clone)]
pub struct PushoutResult {
    pub merged: Arc<Ontology>,
    pub inject_left: Homomorphism,
    pub inject_right: Homomorphism,
}

#[derive(Debug, Clone)]
pub struct PullbackResult {
    pub apex: Arc<Ontology>,
    pub proj_left: Homomorphism,
    pub proj_right: Homomorphism,
}

/// `O1 ⊔_B O2`.
pub fn pushout(pair: &VAlignmentPair) -> PushoutResult {
    pushout_along(pair.left_target(), pair.right_target(), &pair.correspondence())
}

/// Disjoint union, i.e. the pushout over the empty base.
pub fn coproduct(left: &Arc<Ontology>, right: &Arc<Ontology>) -> PushoutResult {
    pushout_along(left, right, &Correspondence::default())
}

struct Member<'a> {
    id: &'a str,
    side: u8,
    index: usize,
}

/// Pushout of two ontologies along a correspondence: the disjoint union
/// quotiented by the equivalence generated by the correspondence pairs.
///
/// Each class is named after its least member id; when two classes would
/// get the same name, the one whose least member comes from the left keeps
/// it and the other gets `#2`, `#3`, ... (skipping every name already
/// claimed).
pub fn pushout_along(left: &Arc<Ontology>, right: &Arc<Ontology>, corr: &Correspondence) -> PushoutResult {
    let (nl, nr) = (left.concept_count(), right.concept_count());
    let mut cuf = UnionFind::new(nl + nr);
    for &(a, b) in &corr.concepts {
        cuf.union(a, nl + b);
    }
    let (ml, mr) = (left.relation_count(), right.relation_count());
    let mut ruf = UnionFind::new(ml + mr);
    for &(a, b) in &corr.relations {
        ruf.union(a, ml + b);
    }
    let (cclass, nc) = cuf.classes();
    let (rclass, nrel) = ruf.classes();

    let concept_member = |x: usize| {
        if x < nl {
            Member { id: &left.concept(x).id, side: 0, index: x }
        } else {
            Member { id: &right.concept(x - nl).id, side: 1, index: x - nl }
        }
    };
    let relation_member = |x: usize| {
        if x < ml {
            Member { id: &left.relation(x).id, side: 0, index: x }
        } else {
            Member { id: &right.relation(x - ml).id, side: 1, index: x - ml }
        }
    };
    let concept_names = class_names(&cclass, nc, concept_member);
    let relation_names = class_names(&rclass, nrel, relation_member);

    let concept_at = |x: usize| if x < nl { left.concept(x) } else { right.concept(x - nl) };
    let relation_at = |x: usize| if x < ml { left.relation(x) } else { right.relation(x - ml) };

    let mut concepts: Vec<Option<Concept>> = vec![None; nc];
    for x in 0..nl + nr {
        let c = concept_at(x);
        let k = cclass[x];
        match &mut concepts[k] {
            slot @ None => {
                *slot = Some(Concept { id: concept_names[k].clone(), tag: c.tag.clone(), label: c.label.clone() })
            }
            Some(existing) => {
                debug_assert_eq!(existing.tag, c.tag, "identified concepts carry equal tags");
                existing.label = min_label(existing.label.take(), c.label.clone());
            }
        }
    }
    let concept_of = |x: usize| -> usize {
        // class of a concept given as (side, index)
        cclass[x]
    };
    let mut relations: Vec<Option<Relation>> = vec![None; nrel];
    for x in 0..ml + mr {
        let r = relation_at(x);
        let (s, d) = if x < ml {
            (concept_of(left.src(x)), concept_of(left.dst(x)))
        } else {
            (concept_of(nl + right.src(x - ml)), concept_of(nl + right.dst(x - ml)))
        };
        let k = rclass[x];
        match &mut relations[k] {
            slot @ None => {
                *slot = Some(Relation {
                    id: relation_names[k].clone(),
                    tag: r.tag.clone(),
                    label: r.label.clone(),
                    src: concept_names[s].clone(),
                    dst: concept_names[d].clone(),
                })
            }
            Some(existing) => {
                debug_assert_eq!(existing.src, concept_names[s], "relation endpoints well defined on classes");
                debug_assert_eq!(existing.dst, concept_names[d], "relation endpoints well defined on classes");
                existing.label = min_label(existing.label.take(), r.label.clone());
            }
        }
    }
    let raw = RawOntology {
        concepts: concepts.into_iter().map(|c| c.expect("every class has a member")).collect(),
        relations: relations.into_iter().map(|r| r.expect("every class has a member")).collect(),
    };
    let merged = Arc::new(validate(raw).expect("pushout is well formed"));

    let cpos: Vec<usize> = concept_names.iter().map(|n| merged.concept_index(n).expect("class")).collect();
    let rpos: Vec<usize> = relation_names.iter().map(|n| merged.relation_index(n).expect("class")).collect();
    let inject_left = Homomorphism::new_unchecked(
        left.clone(),
        merged.clone(),
        (0..nl).map(|x| cpos[cclass[x]]).collect(),
        (0..ml).map(|x| rpos[rclass[x]]).collect(),
    );
    let inject_right = Homomorphism::new_unchecked(
        right.clone(),
        merged.clone(),
        (0..nr).map(|x| cpos[cclass[nl + x]]).collect(),
        (0..mr).map(|x| rpos[rclass[ml + x]]).collect(),
    );
    PushoutResult { merged, inject_left, inject_right }
}

fn min_label(a: Option<String>, b: Option<String>) -> Option<String> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn class_names<'a>(class: &[usize], n: usize, member: impl Fn(usize) -> Member<'a>) -> Vec<String> {
    // least member per class by (id, side, index)
    let mut best: Vec<Option<Member<'a>>> = (0..n).map(|_| None).collect();
    for (x, &k) in class.iter().enumerate() {
        let m = member(x);
        let better = match &best[k] {
            None => true,
            Some(b) => (m.id, m.side, m.index) < (b.id, b.side, b.index),
        };
        if better {
            best[k] = Some(m);
        }
    }
    let best: Vec<Member<'a>> = best.into_iter().map(|m| m.expect("nonempty class")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&best[a], &best[b]);
        (x.id, x.side, x.index).cmp(&(y.id, y.side, y.index))
    });
    let mut names = vec![String::new(); n];
    let mut claimed: HashSet<String> = HashSet::new();
    let mut losers = Vec::new();
    for &k in &order {
        if claimed.insert(best[k].id.to_owned()) {
            names[k] = best[k].id.to_owned();
        } else {
            losers.push(k);
        }
    }
    for k in losers {
        let base = best[k].id;
        let mut i = 2;
        loop {
            let candidate = format!("{base}#{i}");
            if !claimed.contains(&candidate) {
                claimed.insert(candidate.clone());
                names[k] = candidate;
                break;
            }
            i += 1;
        }
    }
    names
}

/// Apex of matching pairs `(x, y)` with `left(x) = right(y)`.
pub fn pullback(left: &Homomorphism, right: &Homomorphism) -> Result<PullbackResult, CategoryError> {
    if !(Arc::ptr_eq(left.target(), right.target()) || left.target() == right.target()) {
        return Err(CategoryError::DomainMismatch("pullback legs have different targets"));
    }
    let (a, b) = (left.source(), right.source());
    let mut corr = Correspondence::default();
    for x in 0..a.concept_count() {
        for y in 0..b.concept_count() {
            if left.map_concept(x) == right.map_concept(y) {
                corr.concepts.insert((x, y));
            }
        }
    }
    for e in 0..a.relation_count() {
        for f in 0..b.relation_count() {
            if left.map_relation(e) == right.map_relation(f) {
                corr.relations.insert((e, f));
            }
        }
    }
    let pair = corr.to_pair(a, b)?;
    Ok(PullbackResult { apex: pair.base().clone(), proj_left: pair.left, proj_right: pair.right })
}

/// The unique `h` out of the pushout with `ι1;h = cocone_left` and
/// `ι2;h = cocone_right`.
pub fn mediating_hom(
    square: &PushoutResult,
    cocone_left: &Homomorphism,
    cocone_right: &Homomorphism,
) -> Result<Homomorphism, CategoryError> {
    let same = |a: &Arc<Ontology>, b: &Arc<Ontology>| Arc::ptr_eq(a, b) || a == b;
    if !same(cocone_left.source(), square.inject_left.source())
        || !same(cocone_right.source(), square.inject_right.source())
    {
        return Err(CategoryError::DomainMismatch("cocone legs do not start at the merged ontologies"));
    }
    if !same(cocone_left.target(), cocone_right.target()) {
        return Err(CategoryError::DomainMismatch("cocone legs have different targets"));
    }
    let merged = &square.merged;
    let mut cmap: Vec<Option<usize>> = vec![None; merged.concept_count()];
    let mut rmap: Vec<Option<usize>> = vec![None; merged.relation_count()];
    for (inject, leg) in [(&square.inject_left, cocone_left), (&square.inject_right, cocone_right)] {
        for (x, &m) in inject.concept_map().iter().enumerate() {
            assign(&mut cmap[m], leg.map_concept(x))?;
        }
        for (x, &m) in inject.relation_map().iter().enumerate() {
            assign(&mut rmap[m], leg.map_relation(x))?;
        }
    }
    let collect = |v: Vec<Option<usize>>| -> Result<Vec<usize>, CategoryError> {
        v.into_iter().map(|x| x.ok_or(CategoryError::DomainMismatch("injections are not jointly surjective"))).collect()
    };
    Ok(Homomorphism::new(merged.clone(), cocone_left.target().clone(), collect(cmap)?, collect(rmap)?)?)
}

fn assign(slot: &mut Option<usize>, value: usize) -> Result<(), CategoryError> {
    match *slot {
        None => {
            *slot = Some(value);
            Ok(())
        }
        Some(v) if v == value => Ok(()),
        Some(_) => Err(CategoryError::CoconeDoesNotCommute),
    }
}

/// `f*`: the morphism between merges induced by a map of alignment pairs.
pub fn induced_merge_hom(
    pair_hom: &AlignmentPairHom,
    src: &PushoutResult,
    dst: &PushoutResult,
) -> Result<Homomorphism, CategoryError> {
    let left = pair_hom.left_map.then(&dst.inject_left)?;
    let right = pair_hom.right_map.then(&dst.inject_right)?;
    mediating_hom(src, &left, &right)
}

/// Alignments involving the merge `X = O1 ⊔_B O2` derived from known pairs.
///
/// For each known pair `(s1: B'→O, s2: B'→O1)` (either orientation) this
/// yields `(s1, ι1∘s2)` and the pullback form `(s1∘π1, ι1∘r1∘π2)` where
/// `(π1, π2)` is the pullback of `s2` and `r1`; likewise for `O2` with `ι2`
/// and `r2`. The reflexive pair on `X` is always included. Results are
/// deduplicated by endpoints and induced correspondence.
pub fn derive_alignments(
    known: &[VAlignmentPair],
    merge_pair: &VAlignmentPair,
    merged: &PushoutResult,
) -> Vec<VAlignmentPair> {
    let mut out: Vec<VAlignmentPair> = Vec::new();
    let push = |p: VAlignmentPair, out: &mut Vec<VAlignmentPair>| {
        let c = p.correspondence();
        let dup = out.iter().any(|q| {
            q.left_target() == p.left_target() && q.right_target() == p.right_target() && q.correspondence() == c
        });
        if !dup {
            out.push(p);
        }
    };
    let operands = [
        (merge_pair.left_target(), merge_pair.left(), &merged.inject_left),
        (merge_pair.right_target(), merge_pair.right(), &merged.inject_right),
    ];
    for k in known {
        for oriented in [k.clone(), k.swapped()] {
            let (s1, s2) = (oriented.left(), oriented.right());
            for (operand, r, inject) in operands {
                if !(Arc::ptr_eq(s2.target(), operand) || s2.target() == operand) {
                    continue;
                }
                let s2 = s2.with_target(operand.clone()).expect("equal target");
                let lifted = s2.then(inject).expect("composable");
                push(VAlignmentPair::new(s1.clone(), lifted).expect("common base"), &mut out);

                let pb = pullback(&s2, r).expect("legs share the operand");
                let left = pb.proj_left.then(s1).expect("composable");
                let right = pb.proj_right.then(r).and_then(|h| h.then(inject)).expect("composable");
                push(VAlignmentPair::new(left, right).expect("common base"), &mut out);
            }
        }
    }
    push(VAlignmentPair::reflexive(merged.merged.clone()), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ontology::{are_isomorphic, find_homomorphisms, SearchMode};

    fn person_pair() -> VAlignmentPair {
        fixtures::person_alignment()
    }

    #[test]
    fn pushout_of_identities_is_the_ontology() {
        let ps = Arc::new(fixtures::person_student());
        let po = pushout(&VAlignmentPair::reflexive(ps.clone()));
        assert_eq!(*po.merged, *ps);
        assert!(po.inject_left.kind().iso);
        assert_eq!(po.inject_left.concept_map(), &[0, 1]);
        assert_eq!(po.inject_right.concept_map(), &[0, 1]);
    }

    #[test]
    fn pushout_over_empty_base_is_coproduct() {
        let ps = Arc::new(fixtures::person_student());
        let pe = Arc::new(fixtures::person_employee());
        let po = pushout(&VAlignmentPair::over_empty(ps.clone(), pe.clone()));
        let co = coproduct(&ps, &pe);
        assert_eq!(co.merged.concept_count(), 4);
        assert_eq!(co.merged.relation_count(), 2);
        assert!(are_isomorphic(&po.merged, &co.merged));
    }

    #[test]
    fn person_merge_has_three_concepts() {
        let po = pushout(&person_pair());
        assert_eq!(po.merged.concept_count(), 3);
        assert_eq!(po.merged.relation_count(), 2);
        assert_eq!(*po.merged, fixtures::merged_person());
        let pair = person_pair();
        assert_eq!(pair.left().then(&po.inject_left).unwrap(), pair.right().then(&po.inject_right).unwrap());
    }

    #[test]
    fn colliding_ids_are_disambiguated() {
        let a = Arc::new(Ontology::builder().concept("x", None).concept("x#2", None).build().unwrap());
        let co = coproduct(&a, &a);
        let ids: Vec<&str> = co.merged.concepts().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, vec!["x", "x#2", "x#2#2", "x#3"]);
        assert!(co.inject_left.kind().injective);
        assert!(co.inject_right.kind().injective);
    }

    #[test]
    fn coproduct_with_empty_is_unit() {
        let ps = Arc::new(fixtures::person_student());
        let co = coproduct(&Arc::new(Ontology::empty()), &ps);
        assert!(are_isomorphic(&co.merged, &ps));
        let twice = coproduct(&ps, &ps);
        assert!(!are_isomorphic(&twice.merged, &ps));
    }

    #[test]
    fn labels_take_the_least_member_label() {
        let a = Arc::new(Ontology::builder().labeled_concept("p", None, "zeta").build().unwrap());
        let b = Arc::new(Ontology::builder().labeled_concept("q", None, "alpha").build().unwrap());
        let base = Arc::new(Ontology::builder().concept("b", None).build().unwrap());
        let pair = VAlignmentPair::new(
            Homomorphism::new(base.clone(), a, vec![0], vec![]).unwrap(),
            Homomorphism::new(base, b, vec![0], vec![]).unwrap(),
        )
        .unwrap();
        let po = pushout(&pair);
        assert_eq!(po.merged.concept(0).id, "p");
        assert_eq!(po.merged.concept(0).label.as_deref(), Some("alpha"));
    }

    #[test]
    fn pullback_examples() {
        let ps = Arc::new(fixtures::person_student());
        let id = Homomorphism::identity(ps.clone());
        let pb = pullback(&id, &id).unwrap();
        assert!(are_isomorphic(&pb.apex, &ps));

        let one = Arc::new(Ontology::builder().concept("b'", Some("Person")).build().unwrap());
        let other = Arc::new(fixtures::person_base());
        let l = Homomorphism::new(one.clone(), ps.clone(), vec![0], vec![]).unwrap();
        let r = Homomorphism::new(other, ps.clone(), vec![0], vec![]).unwrap();
        let pb = pullback(&l, &r).unwrap();
        assert_eq!(pb.apex.concept_count(), 1);
        assert_eq!(pb.apex.relation_count(), 0);
        assert_eq!(pb.apex.concept(0).id, "b'|b");

        let student = Arc::new(Ontology::builder().concept("s", Some("Student")).build().unwrap());
        let r = Homomorphism::new(student, ps, vec![1], vec![]).unwrap();
        let pb = pullback(&l, &r).unwrap();
        assert!(pb.apex.is_empty());
    }

    #[test]
    fn pullback_rejects_different_targets() {
        let ps = Arc::new(fixtures::person_student());
        let pe = Arc::new(fixtures::person_employee());
        let err = pullback(&Homomorphism::identity(ps), &Homomorphism::identity(pe)).unwrap_err();
        assert!(matches!(err, CategoryError::DomainMismatch(_)));
    }

    #[test]
    fn mediator_of_the_injections_is_identity() {
        let po = pushout(&person_pair());
        let h = mediating_hom(&po, &po.inject_left, &po.inject_right).unwrap();
        assert_eq!(h, Homomorphism::identity(po.merged.clone()));
    }

    #[test]
    fn non_commuting_cocone_is_rejected() {
        let pair = person_pair();
        let po = pushout(&pair);
        // PS and PE land on two different Person concepts, so b has two images
        let target = Arc::new(
            Ontology::builder()
                .concept("p1", Some("Person"))
                .concept("p2", Some("Person"))
                .concept("s", Some("Student"))
                .concept("e", Some("Employee"))
                .relation("i1", Some("isa"), "s", "p1")
                .relation("i2", Some("isa"), "e", "p2")
                .build()
                .unwrap(),
        );
        let at = |id: &str| target.concept_index(id).unwrap();
        let cl =
            Homomorphism::new(pair.left_target().clone(), target.clone(), vec![at("p1"), at("s")], vec![0]).unwrap();
        let cr =
            Homomorphism::new(pair.right_target().clone(), target.clone(), vec![at("p2"), at("e")], vec![1]).unwrap();
        assert_eq!(mediating_hom(&po, &cl, &cr).unwrap_err(), CategoryError::CoconeDoesNotCommute);
    }

    #[test]
    fn hom_base_gives_target_back() {
        // over base O1 with pair (1, h): merge is O2, and cocone (h, 1) mediates an iso
        let ps = Arc::new(fixtures::person_student());
        let m = Arc::new(fixtures::merged_person());
        let h = find_homomorphisms(&ps, &m, SearchMode::First, 1000).unwrap().homs().remove(0);
        let pair = VAlignmentPair::new(Homomorphism::identity(ps.clone()), h.clone()).unwrap();
        let po = pushout(&pair);
        assert!(are_isomorphic(&po.merged, &m));
        let med = mediating_hom(&po, &h, &Homomorphism::identity(m)).unwrap();
        assert!(med.kind().iso);
    }

    #[test]
    fn commutativity_inverse_pair() {
        let pair = person_pair();
        let p12 = pushout(&pair);
        let p21 = pushout(&pair.swapped());
        let j1 = mediating_hom(&p12, &p21.inject_right, &p21.inject_left).unwrap();
        let j2 = mediating_hom(&p21, &p12.inject_right, &p12.inject_left).unwrap();
        assert_eq!(j1.then(&j2).unwrap(), Homomorphism::identity(p12.merged.clone()));
        assert_eq!(j2.then(&j1).unwrap(), Homomorphism::identity(p21.merged.clone()));
    }

    #[test]
    fn induced_hom_from_identities_is_identity() {
        let pair = person_pair();
        let po = pushout(&pair);
        let ph = AlignmentPairHom::new(
            &pair,
            &pair,
            Homomorphism::identity(pair.base().clone()),
            Homomorphism::identity(pair.left_target().clone()),
            Homomorphism::identity(pair.right_target().clone()),
        )
        .unwrap();
        let f = induced_merge_hom(&ph, &po, &po).unwrap();
        assert_eq!(f, Homomorphism::identity(po.merged.clone()));
    }

    #[test]
    fn induced_hom_collapses_the_two_person_copies() {
        let pair = person_pair();
        let empty = VAlignmentPair::over_empty(pair.left_target().clone(), pair.right_target().clone());
        let ph = AlignmentPairHom::new(
            &empty,
            &pair,
            Homomorphism::from_empty(pair.base().clone()),
            Homomorphism::identity(pair.left_target().clone()),
            Homomorphism::identity(pair.right_target().clone()),
        )
        .unwrap();
        let src = pushout(&empty);
        let dst = pushout(&pair);
        let f = induced_merge_hom(&ph, &src, &dst).unwrap();
        let k = f.kind();
        assert!(k.surjective && !k.injective);
        // the two Person copies land on the single merged Person
        let persons: Vec<usize> =
            (0..src.merged.concept_count()).filter(|&c| src.merged.concept_tag(c) == Some("Person")).collect();
        assert_eq!(persons.len(), 2);
        assert_eq!(f.map_concept(persons[0]), f.map_concept(persons[1]));
    }

    #[test]
    fn no_known_pairs_derive_only_the_reflexive_pair() {
        let pair = person_pair();
        let po = pushout(&pair);
        let derived = derive_alignments(&[], &pair, &po);
        assert_eq!(derived.len(), 1);
        assert_eq!(derived[0].correspondence(), Correspondence::identity(&po.merged));
    }

    #[test]
    fn known_pair_with_an_operand_lifts_to_the_merge() {
        let pair = person_pair();
        let po = pushout(&pair);
        let q = Arc::new(Ontology::builder().concept("q", Some("Person")).build().unwrap());
        let base = Arc::new(fixtures::person_base());
        let known = VAlignmentPair::new(
            Homomorphism::new(base.clone(), q.clone(), vec![0], vec![]).unwrap(),
            Homomorphism::new(base, pair.left_target().clone(), vec![0], vec![]).unwrap(),
        )
        .unwrap();
        let derived = derive_alignments(&[known], &pair, &po);
        let to_merge: Vec<&VAlignmentPair> =
            derived.iter().filter(|p| **p.left_target() == *q && *p.right_target() == po.merged).collect();
        assert!(!to_merge.is_empty());
        let person_in_m = po.merged.concept_index("c1").unwrap();
        for p in &to_merge {
            assert_eq!(p.correspondence().concepts, BTreeSet::from([(0, person_in_m)]));
            assert!(pushout(p).merged.concept_count() > 0);
        }
    }

    #[test]
    fn correspondence_round_trip() {
        let pair = person_pair();
        let c = pair.correspondence();
        let again = c.to_pair(pair.left_target(), pair.right_target()).unwrap();
        assert_eq!(again.correspondence(), c);
        assert_eq!(*pushout(&again).merged, *pushout(&pair).merged);
    }
}
