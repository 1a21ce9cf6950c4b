//! Seeded random instances: ontologies, alignment pairs, W-diagrams and
//! tag-rigid repositories.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::category::VAlignmentPair;
use crate::closure::Repository;
use crate::ontology::{validate, Concept, Homomorphism, Ontology, RawOntology, Relation};

const CONCEPT_TAGS: [Option<&str>; 3] = [None, Some("A"), Some("B")];
const RELATION_TAGS: [Option<&str>; 3] = [None, Some("r"), Some("s")];

fn pick_tag<R: Rng + ?Sized>(rng: &mut R, tags: &[Option<&str>]) -> Option<String> {
    tags.choose(rng).copied().flatten().map(str::to_owned)
}

/// A random ontology with ids `{prefix}c{i}` / `{prefix}r{i}`.
pub fn random_ontology<R: Rng + ?Sized>(rng: &mut R, concepts: usize, relations: usize, prefix: &str) -> Ontology {
    let mut raw = RawOntology::default();
    for i in 0..concepts {
        raw.concepts.push(Concept { id: format!("{prefix}c{i}"), tag: pick_tag(rng, &CONCEPT_TAGS), label: None });
    }
    if concepts > 0 {
        for i in 0..relations {
            let s = rng.gen_range(0..concepts);
            let d = rng.gen_range(0..concepts);
            raw.relations.push(Relation {
                id: format!("{prefix}r{i}"),
                tag: pick_tag(rng, &RELATION_TAGS),
                label: None,
                src: format!("{prefix}c{s}"),
                dst: format!("{prefix}c{d}"),
            });
        }
    }
    validate(raw).expect("random ontology is well formed")
}

/// A random homomorphism out of `base` into a fresh ontology: base concepts
/// may be glued (when tags agree), base relations may share an image, and
/// up to `extra` further elements are added.
pub fn random_extension<R: Rng + ?Sized>(
    rng: &mut R,
    base: &Arc<Ontology>,
    extra: usize,
    prefix: &str,
) -> Homomorphism {
    let mut raw = RawOntology::default();
    let mut cmap = Vec::with_capacity(base.concept_count());
    for c in 0..base.concept_count() {
        let tag = base.concept(c).tag.clone();
        let glue: Vec<usize> = (0..raw.concepts.len()).filter(|&i| raw.concepts[i].tag == tag).collect();
        if !glue.is_empty() && rng.gen_bool(0.25) {
            cmap.push(*glue.choose(rng).expect("nonempty"));
        } else {
            cmap.push(raw.concepts.len());
            raw.concepts.push(Concept { id: format!("{prefix}c{}", raw.concepts.len()), tag, label: None });
        }
    }
    let mut ends: Vec<(usize, usize)> = Vec::new();
    let mut rmap = Vec::with_capacity(base.relation_count());
    for r in 0..base.relation_count() {
        let (s, d) = (cmap[base.src(r)], cmap[base.dst(r)]);
        let tag = base.relation(r).tag.clone();
        let same: Vec<usize> =
            (0..raw.relations.len()).filter(|&i| ends[i] == (s, d) && raw.relations[i].tag == tag).collect();
        if !same.is_empty() && rng.gen_bool(0.5) {
            rmap.push(same[0]);
        } else {
            rmap.push(raw.relations.len());
            raw.relations.push(Relation {
                id: format!("{prefix}r{}", raw.relations.len()),
                tag,
                label: None,
                src: raw.concepts[s].id.clone(),
                dst: raw.concepts[d].id.clone(),
            });
            ends.push((s, d));
        }
    }
    for _ in 0..extra {
        if raw.concepts.is_empty() || rng.gen_bool(0.5) {
            raw.concepts.push(Concept {
                id: format!("{prefix}c{}", raw.concepts.len()),
                tag: pick_tag(rng, &CONCEPT_TAGS),
                label: None,
            });
        } else {
            let s = rng.gen_range(0..raw.concepts.len());
            let d = rng.gen_range(0..raw.concepts.len());
            raw.relations.push(Relation {
                id: format!("{prefix}r{}", raw.relations.len()),
                tag: pick_tag(rng, &RELATION_TAGS),
                label: None,
                src: raw.concepts[s].id.clone(),
                dst: raw.concepts[d].id.clone(),
            });
            ends.push((s, d));
        }
    }
    // ids are zero-padded-free but sort consistently only below ten; remap by id
    let target = Arc::new(validate(raw.clone()).expect("extension is well formed"));
    let cpos: Vec<usize> = raw.concepts.iter().map(|c| target.concept_index(&c.id).expect("present")).collect();
    let rpos: Vec<usize> = raw.relations.iter().map(|r| target.relation_index(&r.id).expect("present")).collect();
    Homomorphism::new(
        base.clone(),
        target,
        cmap.into_iter().map(|i| cpos[i]).collect(),
        rmap.into_iter().map(|i| rpos[i]).collect(),
    )
    .expect("extension map is a homomorphism")
}

/// A random homomorphism into `target` from a fresh source of at most
/// `max_concepts` concepts (possibly non-injective).
pub fn random_hom_into<R: Rng + ?Sized>(
    rng: &mut R,
    target: &Arc<Ontology>,
    max_concepts: usize,
    prefix: &str,
) -> Homomorphism {
    let mut raw = RawOntology::default();
    let k = if target.concept_count() == 0 { 0 } else { rng.gen_range(0..=max_concepts) };
    let mut images = Vec::with_capacity(k);
    for i in 0..k {
        let t = rng.gen_range(0..target.concept_count());
        images.push(t);
        raw.concepts.push(Concept { id: format!("{prefix}c{i}"), tag: target.concept(t).tag.clone(), label: None });
    }
    let mut rimages = Vec::new();
    for r in 0..target.relation_count() {
        let srcs: Vec<usize> = (0..k).filter(|&i| images[i] == target.src(r)).collect();
        let dsts: Vec<usize> = (0..k).filter(|&i| images[i] == target.dst(r)).collect();
        if srcs.is_empty() || dsts.is_empty() || !rng.gen_bool(0.6) {
            continue;
        }
        let s = *srcs.choose(rng).expect("nonempty");
        let d = *dsts.choose(rng).expect("nonempty");
        raw.relations.push(Relation {
            id: format!("{prefix}r{}", raw.relations.len()),
            tag: target.relation(r).tag.clone(),
            label: None,
            src: raw.concepts[s].id.clone(),
            dst: raw.concepts[d].id.clone(),
        });
        rimages.push(r);
    }
    let source = Arc::new(validate(raw.clone()).expect("source is well formed"));
    let mut cmap = vec![0; k];
    for (i, c) in raw.concepts.iter().enumerate() {
        cmap[source.concept_index(&c.id).expect("present")] = images[i];
    }
    let mut rmap = vec![0; rimages.len()];
    for (i, r) in raw.relations.iter().enumerate() {
        rmap[source.relation_index(&r.id).expect("present")] = rimages[i];
    }
    Homomorphism::new(source, target.clone(), cmap, rmap).expect("preimage map is a homomorphism")
}

/// A random alignment pair whose two targets have at most `max_total`
/// elements together.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, max_total: usize) -> VAlignmentPair {
    loop {
        let bc = rng.gen_range(0..=2);
        let br = if bc == 0 { 0 } else { rng.gen_range(0..=1) };
        let base = Arc::new(random_ontology(rng, bc, br, "b"));
        let e1 = rng.gen_range(0..=3);
        let e2 = rng.gen_range(0..=3);
        let l = random_extension(rng, &base, e1, "");
        let r = random_extension(rng, &base, e2, "");
        if l.target().element_count() + r.target().element_count() <= max_total {
            return VAlignmentPair::new(l, r).expect("common base");
        }
    }
}

/// Two pairs `B1 → O1, O2` and `B2 → O2, O3` sharing the middle ontology.
pub fn random_w_diagram<R: Rng + ?Sized>(rng: &mut R) -> (VAlignmentPair, VAlignmentPair) {
    let p1 = random_pair(rng, 8);
    let o2 = p1.right_target().clone();
    let s = random_hom_into(rng, &o2, 2, "w");
    let e = rng.gen_range(0..=3);
    let t = random_extension(rng, s.source(), e, "z");
    let p2 = VAlignmentPair::new(s, t).expect("common base");
    (p1, p2)
}

/// A repository of 2..=`max_generators` tag-rigid generators with at most
/// `max_elements` elements each.
///
/// Generators are sub-ontologies of one random universe whose concepts have
/// pairwise distinct tags and whose relations are unique per (src, dst,
/// tag). Every pair of generators is aligned over its maximal common
/// sub-ontology (possibly empty). Ids are prefixed per generator, so
/// merges really identify elements rather than matching names.
pub fn random_rigid_repository<R: Rng + ?Sized>(rng: &mut R, max_generators: usize, max_elements: usize) -> Repository {
    let n = rng.gen_range(3..=5);
    let mut rels: BTreeSet<(usize, usize, &str)> = BTreeSet::new();
    for _ in 0..rng.gen_range(2..=6) {
        let s = rng.gen_range(0..n);
        let d = rng.gen_range(0..n);
        rels.insert((s, d, ["r", "s"][rng.gen_range(0..2)]));
    }
    let rels: Vec<(usize, usize, &str)> = rels.into_iter().collect();
    let g = rng.gen_range(2..=max_generators.max(2));
    let mut parts: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    while parts.len() < g {
        let cs: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if cs.is_empty() {
            continue;
        }
        let rs: Vec<usize> = (0..rels.len())
            .filter(|&i| cs.contains(&rels[i].0) && cs.contains(&rels[i].1) && rng.gen_bool(0.7))
            .collect();
        if cs.len() + rs.len() > max_elements || parts.iter().any(|p| p.0 == cs && p.1 == rs) {
            continue;
        }
        parts.push((cs, rs));
    }
    let build = |cs: &[usize], rs: &[usize], prefix: &str| -> Ontology {
        let mut b = Ontology::builder();
        for &c in cs {
            b = b.concept(&format!("{prefix}{c}"), Some(&format!("T{c}")));
        }
        for &r in rs {
            let (s, d, t) = rels[r];
            b = b.relation(&format!("{prefix}e{r}"), Some(t), &format!("{prefix}{s}"), &format!("{prefix}{d}"));
        }
        b.build().expect("sub-ontology is well formed")
    };
    let mut repo = Repository::new();
    let mut onts = Vec::new();
    for (i, (cs, rs)) in parts.iter().enumerate() {
        let o = Arc::new(build(cs, rs, &format!("g{i}_")));
        repo.add(format!("G{i}"), o.clone()).expect("fresh name");
        onts.push(o);
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let cs: Vec<usize> = parts[i].0.iter().copied().filter(|c| parts[j].0.contains(c)).collect();
            let rs: Vec<usize> = parts[i].1.iter().copied().filter(|r| parts[j].1.contains(r)).collect();
            let base = Arc::new(build(&cs, &rs, "b"));
            let leg = |o: &Arc<Ontology>, prefix: &str| {
                let cmap = (0..base.concept_count())
                    .map(|k| o.concept_index(&format!("{prefix}{}", &base.concept(k).id[1..])));
                let rmap = (0..base.relation_count())
                    .map(|k| o.relation_index(&format!("{prefix}{}", &base.relation(k).id[1..])));
                Homomorphism::new(
                    base.clone(),
                    o.clone(),
                    cmap.map(|x| x.expect("shared concept")).collect(),
                    rmap.map(|x| x.expect("shared relation")).collect(),
                )
                .expect("inclusion is a homomorphism")
            };
            let pair = VAlignmentPair::new(leg(&onts[i], &format!("g{i}_")), leg(&onts[j], &format!("g{j}_")))
                .expect("common base");
            repo.align(i, j, pair).expect("valid alignment");
        }
    }
    repo
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = random_pair(&mut rng, 8);
            assert!(p.left_target().element_count() + p.right_target().element_count() <= 8);
            let (a, b) = random_w_diagram(&mut rng);
            assert_eq!(a.right_target(), b.left_target());
        }
        for _ in 0..20 {
            let repo = random_rigid_repository(&mut rng, 4, 6);
            assert!((2..=4).contains(&repo.len()));
            for i in 0..repo.len() {
                assert!(repo.ontology(i).element_count() <= 6);
            }
            assert_eq!(repo.alignments().count(), repo.len() * (repo.len() - 1) / 2);
        }
    }
}
