//! Canonical forms and isomorphism.
//!
//! Concepts are colored by tag and per-relation-tag degree counts, and the
//! coloring is refined until stable. When refinement stalls with a
//! non-singleton cell, each member of the first such cell is individualized
//! in turn and the search recurses; every discrete coloring is a candidate
//! labeling and the lexicographically least encoding wins. Automorphisms
//! found along the way (two leaves with equal encodings) prune children in
//! the same orbit of the pointwise stabilizer of the current path.
//!
//! The encoding uses tag strings, never ids or labels, so keys compare
//! across ontologies.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::{Homomorphism, Ontology};

/// Renaming-invariant isomorphism key.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Short hex digest, used for file names and CLI references.
    pub fn digest(&self) -> String {
        let h = Sha256::digest(&self.0);
        hex::encode(&h[..8])
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.digest())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digest())
    }
}

/// A canonical key together with the labeling that produced it.
#[derive(Debug, Clone)]
pub struct CanonicalLabeling {
    pub key: CanonicalKey,
    /// `concept_order[i]` is the concept placed at canonical position `i`.
    pub concept_order: Vec<usize>,
    /// Relations sorted by canonical (src, dst, tag); parallel duplicates by index.
    pub relation_order: Vec<usize>,
}

pub fn canonical_form(o: &Ontology) -> CanonicalKey {
    canonical_labeling(o).key
}

pub fn are_isomorphic(a: &Ontology, b: &Ontology) -> bool {
    a.concept_count() == b.concept_count()
        && a.relation_count() == b.relation_count()
        && canonical_form(a) == canonical_form(b)
}

/// An isomorphism `a → b`, if one exists.
pub fn isomorphism(a: &Arc<Ontology>, b: &Arc<Ontology>) -> Option<Homomorphism> {
    if a.concept_count() != b.concept_count() || a.relation_count() != b.relation_count() {
        return None;
    }
    let la = canonical_labeling(a);
    let lb = canonical_labeling(b);
    if la.key != lb.key {
        return None;
    }
    Some(iso_between(a, b, &la, &lb))
}

/// Zips two labelings with equal keys into an isomorphism.
pub(crate) fn iso_between(
    a: &Arc<Ontology>,
    b: &Arc<Ontology>,
    la: &CanonicalLabeling,
    lb: &CanonicalLabeling,
) -> Homomorphism {
    let mut cmap = vec![0; a.concept_count()];
    for (i, &c) in la.concept_order.iter().enumerate() {
        cmap[c] = lb.concept_order[i];
    }
    let mut rmap = vec![0; a.relation_count()];
    for (i, &r) in la.relation_order.iter().enumerate() {
        rmap[r] = lb.relation_order[i];
    }
    Homomorphism::new_unchecked(a.clone(), b.clone(), cmap, rmap)
}

const MAX_STORED_AUTOMORPHISMS: usize = 256;

struct Graph<'a> {
    o: &'a Ontology,
    // (direction, relation tag rank, neighbour)
    adj: Vec<Vec<(u8, usize, usize)>>,
}

struct Search<'a> {
    g: Graph<'a>,
    best: Option<(Vec<u8>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
    // classes of concepts any two of which can be swapped by an automorphism
    twins: Vec<Vec<usize>>,
}

/// Groups concepts `u`, `v` for which the transposition `(u v)` is an
/// automorphism: same initial color and the same incidences once `u` and
/// `v` are identified. Swaps of twins generate the full symmetric group on
/// each class, which isolated concepts and star leaves need to avoid an
/// exponential search.
fn twin_classes(adj: &[Vec<(u8, usize, usize)>], colors: &[usize]) -> Vec<Vec<usize>> {
    const SELF: usize = usize::MAX;
    const OTHER: usize = usize::MAX - 1;
    let view = |u: usize, v: usize| {
        let mut nb: Vec<(u8, usize, usize)> = adj[u]
            .iter()
            .map(|&(d, t, w)| {
                (
                    d,
                    t,
                    if w == u {
                        SELF
                    } else if w == v {
                        OTHER
                    } else {
                        w
                    },
                )
            })
            .collect();
        nb.sort_unstable();
        nb
    };
    let n = colors.len();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for u in 0..n {
        if class_of[u] != usize::MAX {
            continue;
        }
        let mut class = vec![u];
        for v in u + 1..n {
            if class_of[v] == usize::MAX
                && colors[v] == colors[u]
                && adj[u].len() == adj[v].len()
                && view(u, v) == view(v, u)
            {
                class_of[v] = classes.len();
                class.push(v);
            }
        }
        class_of[u] = classes.len();
        classes.push(class);
    }
    classes.retain(|c| c.len() > 1);
    classes
}

pub fn canonical_labeling(o: &Ontology) -> CanonicalLabeling {
    let n = o.concept_count();
    let mut rel_tags: Vec<Option<&str>> = (0..o.relation_count()).map(|r| o.relation_tag(r)).collect();
    rel_tags.sort();
    rel_tags.dedup();
    let tag_rank = |t: Option<&str>| rel_tags.binary_search(&t).expect("tag present");

    let mut adj = vec![Vec::new(); n];
    for r in 0..o.relation_count() {
        let t = tag_rank(o.relation_tag(r));
        adj[o.src(r)].push((0u8, t, o.dst(r)));
        adj[o.dst(r)].push((1u8, t, o.src(r)));
    }

    // initial colors: concept tag, then sorted (direction, relation tag) incidences
    let sigs: Vec<(Option<&str>, Vec<(u8, usize)>)> = (0..n)
        .map(|c| {
            let mut inc: Vec<(u8, usize)> = adj[c].iter().map(|&(d, t, _)| (d, t)).collect();
            inc.sort_unstable();
            (o.concept_tag(c), inc)
        })
        .collect();
    let colors = rank(&sigs);

    let twins = twin_classes(&adj, &colors);
    let mut search = Search { g: Graph { o, adj }, best: None, autos: Vec::new(), twins };
    search.descend(colors, &mut Vec::new());

    let (key, perm) = search.best.unwrap_or_else(|| (encode(o, &[]), Vec::new()));
    let relation_order = relation_order(o, &perm);
    CanonicalLabeling { key: CanonicalKey(key), concept_order: perm, relation_order }
}

fn rank<T: Ord>(sigs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<&T> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    sigs.iter().map(|s| sorted.binary_search(&s).expect("present")).collect()
}

fn class_count(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

impl Graph<'_> {
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut classes = class_count(&colors);
        loop {
            let sigs: Vec<(usize, Vec<(u8, usize, usize)>)> = (0..colors.len())
                .map(|c| {
                    let mut nb: Vec<(u8, usize, usize)> =
                        self.adj[c].iter().map(|&(d, t, v)| (d, t, colors[v])).collect();
                    nb.sort_unstable();
                    (colors[c], nb)
                })
                .collect();
            let next = rank(&sigs);
            let next_classes = class_count(&next);
            colors = next;
            if next_classes == classes {
                return colors;
            }
            classes = next_classes;
        }
    }
}

fn individualize(colors: &[usize], v: usize) -> Vec<usize> {
    let sigs: Vec<(usize, bool)> = colors.iter().enumerate().map(|(u, &c)| (c, u != v)).collect();
    rank(&sigs)
}

impl Search<'_> {
    fn descend(&mut self, colors: Vec<usize>, path: &mut Vec<usize>) {
        let colors = self.g.refine(colors);
        let n = colors.len();
        if class_count(&colors) == n {
            self.leaf(&colors);
            return;
        }
        let mut counts = vec![0usize; n];
        colors.iter().for_each(|&c| counts[c] += 1);
        let target = counts.iter().position(|&k| k > 1).expect("non-discrete coloring");
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();

        let mut tried: Vec<usize> = Vec::new();
        for v in cell {
            if !tried.is_empty() && self.same_orbit(path, &tried, v) {
                continue;
            }
            tried.push(v);
            path.push(v);
            self.descend(individualize(&colors, v), path);
            path.pop();
        }
    }

    fn leaf(&mut self, colors: &[usize]) {
        let mut perm = vec![0; colors.len()];
        for (v, &c) in colors.iter().enumerate() {
            perm[c] = v;
        }
        let code = encode(self.g.o, &perm);
        match &self.best {
            None => self.best = Some((code, perm)),
            Some((best, best_perm)) => match code.cmp(best) {
                Ordering::Less => self.best = Some((code, perm)),
                Ordering::Equal => {
                    if self.autos.len() < MAX_STORED_AUTOMORPHISMS {
                        let mut auto = vec![0; perm.len()];
                        for i in 0..perm.len() {
                            auto[best_perm[i]] = perm[i];
                        }
                        if auto.iter().enumerate().any(|(i, &j)| i != j) {
                            self.autos.push(auto);
                        }
                    }
                }
                Ordering::Greater => {}
            },
        }
    }

    /// Whether `v` shares an orbit with an already explored sibling under the
    /// known automorphisms that fix `path` pointwise.
    fn same_orbit(&self, path: &[usize], tried: &[usize], v: usize) -> bool {
        let n = self.g.o.concept_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for class in &self.twins {
            let mut free = class.iter().copied().filter(|x| !path.contains(x));
            if let Some(first) = free.next() {
                for x in free {
                    any = true;
                    let (ri, rj) = (find(&mut parent, first), find(&mut parent, x));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        for a in &self.autos {
            if path.iter().all(|&p| a[p] == p) {
                any = true;
                for (i, &j) in a.iter().enumerate() {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&u| find(&mut parent, u) == rv)
    }
}

fn push_u32(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u32).to_be_bytes());
}

fn push_tag(out: &mut Vec<u8>, t: Option<&str>) {
    match t {
        None => out.push(0),
        Some(s) => {
            out.push(1);
            push_u32(out, s.len());
            out.extend_from_slice(s.as_bytes());
        }
    }
}

fn relation_order(o: &Ontology, perm: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; perm.len()];
    for (i, &v) in perm.iter().enumerate() {
        pos[v] = i;
    }
    let mut rels: Vec<usize> = (0..o.relation_count()).collect();
    rels.sort_by(|&a, &b| {
        (pos[o.src(a)], pos[o.dst(a)], o.relation_tag(a), a).cmp(&(pos[o.src(b)], pos[o.dst(b)], o.relation_tag(b), b))
    });
    rels
}

fn encode(o: &Ontology, perm: &[usize]) -> Vec<u8> {
    let mut out = Vec::new();
    push_u32(&mut out, o.concept_count());
    push_u32(&mut out, o.relation_count());
    for &v in perm {
        push_tag(&mut out, o.concept_tag(v));
    }
    let mut pos = vec![0; perm.len()];
    for (i, &v) in perm.iter().enumerate() {
        pos[v] = i;
    }
    let mut rels: Vec<(usize, usize, Option<&str>)> =
        (0..o.relation_count()).map(|r| (pos[o.src(r)], pos[o.dst(r)], o.relation_tag(r))).collect();
    rels.sort_unstable();
    for (s, d, t) in rels {
        push_u32(&mut out, s);
        push_u32(&mut out, d);
        push_tag(&mut out, t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn two_cycle(a: &str, b: &str) -> Ontology {
        Ontology::builder()
            .concept(a, None)
            .concept(b, None)
            .relation(&format!("{a}{b}"), None, a, b)
            .relation(&format!("{b}{a}"), None, b, a)
            .build()
            .unwrap()
    }

    #[test]
    fn renaming_and_labels_do_not_change_the_key() {
        let ps = fixtures::person_student();
        let renamed = ps.rename_ids(|id| format!("zz{id}")).unwrap();
        assert_eq!(canonical_form(&ps), canonical_form(&renamed));
        let labeled = Ontology::builder()
            .labeled_concept("c1", Some("Person"), "a person")
            .concept("c2", Some("Student"))
            .relation("e1", Some("isa"), "c2", "c1")
            .build()
            .unwrap();
        assert_eq!(canonical_form(&ps), canonical_form(&labeled));
    }

    #[test]
    fn person_student_and_person_employee_differ() {
        assert_ne!(canonical_form(&fixtures::person_student()), canonical_form(&fixtures::person_employee()));
    }

    #[test]
    fn untagged_two_cycles_are_isomorphic() {
        let a = Arc::new(two_cycle("p", "q"));
        let b = Arc::new(two_cycle("x", "y"));
        assert_eq!(canonical_form(&a), canonical_form(&b));
        let iso = isomorphism(&a, &b).unwrap();
        assert!(iso.kind().iso);
    }

    #[test]
    fn direction_matters() {
        let a = Ontology::builder()
            .concept("a", Some("T"))
            .concept("b", None)
            .relation("r", None, "a", "b")
            .build()
            .unwrap();
        let b = Ontology::builder()
            .concept("a", Some("T"))
            .concept("b", None)
            .relation("r", None, "b", "a")
            .build()
            .unwrap();
        assert_ne!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn many_isolated_concepts_are_fast() {
        let mut b = Ontology::builder();
        for i in 0..40 {
            b = b.concept(&format!("c{i:02}"), None);
        }
        let o = b.build().unwrap();
        let l = canonical_labeling(&o);
        assert_eq!(l.concept_order.len(), 40);
    }

    #[test]
    fn star_with_many_leaves() {
        let mut b = Ontology::builder().concept("hub", None);
        for i in 0..20 {
            b = b.concept(&format!("l{i:02}"), None).relation(&format!("r{i:02}"), None, &format!("l{i:02}"), "hub");
        }
        let o = Arc::new(b.build().unwrap());
        let shuffled = Arc::new(o.rename_ids(|id| id.chars().rev().collect()).unwrap());
        assert!(isomorphism(&o, &shuffled).is_some());
    }

    #[test]
    fn empty_ontology_has_a_key() {
        let k = canonical_form(&Ontology::empty());
        assert_eq!(k, canonical_form(&Ontology::empty()));
        assert_ne!(k, canonical_form(&fixtures::person_base()));
    }
}
