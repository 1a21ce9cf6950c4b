//! Brute-force oracles, written independently of the library algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ontomerge::{Correspondence, Homomorphism, Ontology, VAlignmentPair};

/// Tag-only view of an ontology: concept tags and (src, dst, tag) edges.
#[derive(Debug, Clone)]
pub struct Shape {
    pub concepts: Vec<Option<String>>,
    pub relations: Vec<(usize, usize, Option<String>)>,
}

impl Shape {
    pub fn of(o: &Ontology) -> Shape {
        Shape {
            concepts: o.concepts().iter().map(|c| c.tag.clone()).collect(),
            relations: (0..o.relation_count()).map(|r| (o.src(r), o.dst(r), o.relation(r).tag.clone())).collect(),
        }
    }
}

/// Pushout oracle: repeatedly relabel equivalence classes (no union-find)
/// until the seed pairs are all identified, then build the quotient shape.
pub fn quotient_pushout(pair: &VAlignmentPair) -> Shape {
    let (a, b) = (Shape::of(pair.left_target()), Shape::of(pair.right_target()));
    let corr: Correspondence = pair.correspondence();
    let na = a.concepts.len();
    let ma = a.relations.len();
    let classes = |n: usize, seeds: Vec<(usize, usize)>| -> Vec<usize> {
        let mut label: Vec<usize> = (0..n).collect();
        loop {
            let mut changed = false;
            for &(x, y) in &seeds {
                if label[x] != label[y] {
                    let (from, to) = (label[x].max(label[y]), label[x].min(label[y]));
                    for l in label.iter_mut() {
                        if *l == from {
                            *l = to;
                        }
                    }
                    changed = true;
                }
            }
            if !changed {
                return label;
            }
        }
    };
    let cl = classes(na + b.concepts.len(), corr.concepts.iter().map(|&(x, y)| (x, na + y)).collect());
    let rl = classes(ma + b.relations.len(), corr.relations.iter().map(|&(x, y)| (x, ma + y)).collect());
    let mut cidx: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in &cl {
        let k = cidx.len();
        cidx.entry(l).or_insert(k);
    }
    let tags: Vec<Option<String>> = a.concepts.iter().chain(&b.concepts).cloned().collect();
    let mut concepts = vec![None; cidx.len()];
    for (x, &l) in cl.iter().enumerate() {
        concepts[cidx[&l]] = tags[x].clone();
    }
    let all_rel: Vec<(usize, usize, Option<String>)> =
        a.relations.iter().cloned().chain(b.relations.iter().map(|(s, d, t)| (s + na, d + na, t.clone()))).collect();
    let mut seen: BTreeMap<usize, (usize, usize, Option<String>)> = BTreeMap::new();
    for (x, &l) in rl.iter().enumerate() {
        let (s, d, t) = &all_rel[x];
        seen.entry(l).or_insert((cidx[&cl[*s]], cidx[&cl[*d]], t.clone()));
    }
    Shape { concepts, relations: seen.into_values().collect() }
}

/// Isomorphism oracle: try every tag-respecting concept bijection and
/// compare the mapped edge multisets.
pub fn shapes_isomorphic(a: &Shape, b: &Shape) -> bool {
    if a.concepts.len() != b.concepts.len() || a.relations.len() != b.relations.len() {
        return false;
    }
    let mut target = b.relations.clone();
    target.sort();
    let n = a.concepts.len();
    let mut p = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        a: &Shape,
        b: &Shape,
        target: &[(usize, usize, Option<String>)],
        p: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == p.len() {
            let mut mapped: Vec<(usize, usize, Option<String>)> =
                a.relations.iter().map(|(s, d, t)| (p[*s], p[*d], t.clone())).collect();
            mapped.sort();
            return mapped == target;
        }
        for j in 0..p.len() {
            if used[j] || a.concepts[i] != b.concepts[j] {
                continue;
            }
            used[j] = true;
            p[i] = j;
            if go(i + 1, a, b, target, p, used) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    go(0, a, b, &target, &mut p, &mut used)
}

pub fn iso_oracle(a: &Ontology, b: &Ontology) -> bool {
    shapes_isomorphic(&Shape::of(a), &Shape::of(b))
}

fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..m).map(move |j| [v.clone(), vec![j]].concat())).collect();
    }
    out
}

/// Hom-count oracle: enumerate every pair of total maps and keep those that
/// preserve tags and incidence.
pub fn count_homs(s: &Ontology, t: &Ontology) -> u128 {
    let (ss, ts) = (Shape::of(s), Shape::of(t));
    let mut n = 0;
    for cm in all_maps(ss.concepts.len(), ts.concepts.len()) {
        if !(0..ss.concepts.len()).all(|i| ss.concepts[i] == ts.concepts[cm[i]]) {
            continue;
        }
        for rm in all_maps(ss.relations.len(), ts.relations.len()) {
            let ok = ss.relations.iter().enumerate().all(|(i, (a, b, tag))| {
                let (x, y, u) = &ts.relations[rm[i]];
                *x == cm[*a] && *y == cm[*b] && tag == u
            });
            if ok {
                n += 1;
            }
        }
    }
    n
}

/// Every homomorphism, as (concept map, relation map), by brute force.
pub fn all_homs(s: &Ontology, t: &Ontology) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (ss, ts) = (Shape::of(s), Shape::of(t));
    let mut out = Vec::new();
    for cm in all_maps(ss.concepts.len(), ts.concepts.len()) {
        if !(0..ss.concepts.len()).all(|i| ss.concepts[i] == ts.concepts[cm[i]]) {
            continue;
        }
        for rm in all_maps(ss.relations.len(), ts.relations.len()) {
            let ok = ss.relations.iter().enumerate().all(|(i, (a, b, tag))| {
                let (x, y, u) = &ts.relations[rm[i]];
                *x == cm[*a] && *y == cm[*b] && tag == u
            });
            if ok {
                out.push((cm.clone(), rm));
            }
        }
    }
    out
}

/// Mediator count: homomorphisms h out of the merge with ι1;h = left and
/// ι2;h = right, found by scanning all homomorphisms.
pub fn count_mediators(
    merged: &Ontology,
    inject_left: &Homomorphism,
    inject_right: &Homomorphism,
    left: &Homomorphism,
    right: &Homomorphism,
) -> usize {
    all_homs(merged, left.target())
        .into_iter()
        .filter(|(cm, rm)| {
            let agrees = |inj: &Homomorphism, leg: &Homomorphism| {
                (0..inj.concept_map().len()).all(|x| cm[inj.map_concept(x)] == leg.map_concept(x))
                    && (0..inj.relation_map().len()).all(|x| rm[inj.map_relation(x)] == leg.map_relation(x))
            };
            agrees(inject_left, left) && agrees(inject_right, right)
        })
        .count()
}

/// Union of ontologies whose concepts are identified by their tags alone.
pub fn tag_union(parts: &[&Ontology]) -> Shape {
    let mut tags: BTreeSet<String> = BTreeSet::new();
    let mut edges: BTreeSet<(String, String, Option<String>)> = BTreeSet::new();
    for o in parts {
        for c in o.concepts() {
            tags.insert(c.tag.clone().expect("tagged"));
        }
        for r in 0..o.relation_count() {
            let t = |c: usize| o.concept(c).tag.clone().expect("tagged");
            edges.insert((t(o.src(r)), t(o.dst(r)), o.relation(r).tag.clone()));
        }
    }
    let tags: Vec<String> = tags.into_iter().collect();
    let pos = |t: &String| tags.iter().position(|x| x == t).expect("present");
    Shape {
        concepts: tags.iter().cloned().map(Some).collect(),
        relations: edges.iter().map(|(s, d, t)| (pos(s), pos(d), t.clone())).collect(),
    }
}
