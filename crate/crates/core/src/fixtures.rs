//! Reference ontologies, repositories and fixture merging systems.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::algebra::{MergeOutcome, MergingSystem};
use crate::category::{coproduct, VAlignmentPair};
use crate::closure::Repository;
use crate::ontology::{Homomorphism, Ontology};

/// `c1: Person`, `c2: Student`, `e1: c2 -isa-> c1`.
pub fn person_student() -> Ontology {
    Ontology::builder()
        .concept("c1", Some("Person"))
        .concept("c2", Some("Student"))
        .relation("e1", Some("isa"), "c2", "c1")
        .build()
        .expect("valid fixture")
}

/// `d1: Person`, `d2: Employee`, `f1: d2 -isa-> d1`.
pub fn person_employee() -> Ontology {
    Ontology::builder()
        .concept("d1", Some("Person"))
        .concept("d2", Some("Employee"))
        .relation("f1", Some("isa"), "d2", "d1")
        .build()
        .expect("valid fixture")
}

/// A single `Person` concept `b`.
pub fn person_base() -> Ontology {
    Ontology::builder().concept("b", Some("Person")).build().expect("valid fixture")
}

/// `b ↦ c1` in PS and `b ↦ d1` in PE.
pub fn person_alignment() -> VAlignmentPair {
    let base = Arc::new(person_base());
    let l = Homomorphism::new(base.clone(), Arc::new(person_student()), vec![0], vec![]).expect("valid");
    let r = Homomorphism::new(base, Arc::new(person_employee()), vec![0], vec![]).expect("valid");
    VAlignmentPair::new(l, r).expect("common base")
}

/// PS ⊔ PE over the shared Person.
pub fn merged_person() -> Ontology {
    Ontology::builder()
        .concept("c1", Some("Person"))
        .concept("c2", Some("Student"))
        .concept("d2", Some("Employee"))
        .relation("e1", Some("isa"), "c2", "c1")
        .relation("f1", Some("isa"), "d2", "c1")
        .build()
        .expect("valid fixture")
}

/// `{PS, PE}` aligned over the Person base.
pub fn person_repository() -> Repository {
    let mut repo = Repository::new();
    let ps = repo.add("PS", person_student()).expect("fresh name");
    let pe = repo.add("PE", person_employee()).expect("fresh name");
    repo.align(ps, pe, person_alignment()).expect("valid alignment");
    repo
}

fn chain(ids: &[(&str, &str)], prefix: &str) -> Ontology {
    let mut b = Ontology::builder();
    for (id, tag) in ids {
        b = b.concept(&format!("{prefix}{id}"), Some(tag));
    }
    for w in ids.windows(2) {
        let (s, d) = (format!("{prefix}{}", w[0].0), format!("{prefix}{}", w[1].0));
        b = b.relation(&format!("{prefix}{}{}", w[0].0, w[1].0), Some("next"), &s, &d);
    }
    b.build().expect("valid chain")
}

/// Aligns the concepts with equal tags (and no relations) of two ontologies.
pub fn align_on_tags(left: &Arc<Ontology>, right: &Arc<Ontology>, tags: &[&str]) -> VAlignmentPair {
    let mut b = Ontology::builder();
    for t in tags {
        b = b.concept(&format!("b{t}"), Some(t));
    }
    let base = Arc::new(b.build().expect("valid base"));
    let find =
        |o: &Ontology, t: &str| (0..o.concept_count()).find(|&c| o.concept_tag(c) == Some(t)).expect("tag present");
    let lmap = (0..base.concept_count()).map(|i| find(left, base.concept_tag(i).expect("tagged"))).collect();
    let rmap = (0..base.concept_count()).map(|i| find(right, base.concept_tag(i).expect("tagged"))).collect();
    VAlignmentPair::new(
        Homomorphism::new(base.clone(), left.clone(), lmap, vec![]).expect("valid"),
        Homomorphism::new(base, right.clone(), rmap, vec![]).expect("valid"),
    )
    .expect("common base")
}

/// `O1 = P→Q`, `O2 = Q→R`, `O3 = R→S`, aligned pairwise over `{Q}`, `{R}`
/// and the empty base. Its closure has the seven nonempty subset merges.
pub fn three_generator_repository() -> Repository {
    let o1 = Arc::new(chain(&[("p", "P"), ("q", "Q")], "x"));
    let o2 = Arc::new(chain(&[("q", "Q"), ("r", "R")], "y"));
    let o3 = Arc::new(chain(&[("r", "R"), ("s", "S")], "z"));
    let mut repo = Repository::new();
    let a = repo.add("O1", o1.clone()).expect("fresh");
    let b = repo.add("O2", o2.clone()).expect("fresh");
    let c = repo.add("O3", o3.clone()).expect("fresh");
    repo.align(a, b, align_on_tags(&o1, &o2, &["Q"])).expect("valid");
    repo.align(b, c, align_on_tags(&o2, &o3, &["R"])).expect("valid");
    repo.align(a, c, VAlignmentPair::over_empty(o1, o3)).expect("valid");
    repo
}

/// Graphs with registered overlaps: `G1 = A→B→C` and `G2 = B→C→D` overlap
/// in the edge `B→C`; `G2` and `G3 = D→E` overlap in `D`.
pub fn graph_overlap_repository() -> Repository {
    let g1 = Arc::new(chain(&[("a", "A"), ("b", "B"), ("c", "C")], "g1"));
    let g2 = Arc::new(chain(&[("b", "B"), ("c", "C"), ("d", "D")], "g2"));
    let g3 = Arc::new(chain(&[("d", "D"), ("e", "E")], "g3"));
    let overlap = Arc::new(chain(&[("b", "B"), ("c", "C")], "s"));
    let mut repo = Repository::new();
    let i1 = repo.add("G1", g1.clone()).expect("fresh");
    let i2 = repo.add("G2", g2.clone()).expect("fresh");
    let i3 = repo.add("G3", g3.clone()).expect("fresh");
    let s1 = Homomorphism::new(overlap.clone(), g1, vec![1, 2], vec![1]).expect("B→C sits in G1");
    let s2 = Homomorphism::new(overlap, g2.clone(), vec![0, 1], vec![0]).expect("B→C sits in G2");
    repo.align(i1, i2, VAlignmentPair::new(s1, s2).expect("common base")).expect("valid");
    repo.align(i2, i3, align_on_tags(&g2, &g3, &["D"])).expect("valid");
    repo
}

/// Disjoint union with saturating multiplicities.
///
/// Elements are multiplicity vectors over a fixed list of connected atoms,
/// each count in `0..=cap`. Every pair aligns and merging adds counts,
/// saturating at `cap`; below the cap this is exactly the disjoint union of
/// the materialised ontologies.
#[derive(Debug, Clone)]
pub struct DisjointUnionSystem {
    atoms: Vec<Arc<Ontology>>,
    cap: u8,
    vectors: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl DisjointUnionSystem {
    pub fn new(atoms: Vec<Ontology>, cap: u8) -> Self {
        let k = atoms.len();
        let mut vectors: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..k {
            vectors = vectors
                .into_iter()
                .flat_map(|v| {
                    (0..=cap).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        let index = vectors.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        DisjointUnionSystem { atoms: atoms.into_iter().map(Arc::new).collect(), cap, vectors, index }
    }

    /// Atoms: a lone `Person`, and `Student -isa-> Person`; cap 2.
    pub fn standard() -> Self {
        let person = Ontology::builder().concept("p", Some("Person")).build().expect("valid");
        DisjointUnionSystem::new(vec![person, person_student()], 2)
    }

    pub fn vector(&self, a: usize) -> &[u8] {
        &self.vectors[a]
    }

    pub fn index_of(&self, v: &[u8]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// The ontology an element stands for: the disjoint union of its atoms.
    pub fn ontology(&self, a: usize) -> Ontology {
        let mut acc = Arc::new(Ontology::empty());
        for (atom, &count) in self.atoms.iter().zip(&self.vectors[a]) {
            for _ in 0..count {
                acc = coproduct(&acc, atom).merged;
            }
        }
        Arc::try_unwrap(acc).unwrap_or_else(|a| (*a).clone())
    }
}

impl MergingSystem for DisjointUnionSystem {
    fn carrier_size(&self) -> usize {
        self.vectors.len()
    }

    fn aligns(&self, _a: usize, _b: usize) -> bool {
        true
    }

    fn merge(&self, a: usize, b: usize) -> MergeOutcome {
        let v: Vec<u8> = self.vectors[a].iter().zip(&self.vectors[b]).map(|(x, y)| (x + y).min(self.cap)).collect();
        MergeOutcome::Defined(self.index[&v])
    }

    fn element_name(&self, a: usize) -> String {
        format!("{:?}", self.vectors[a])
    }
}

/// Rows keyed by an entity pair, each carrying a set of attributes.
pub type KeyedTable = BTreeMap<(String, String), BTreeSet<String>>;

/// Full outer join on the entity-pair key.
pub fn full_join(a: &KeyedTable, b: &KeyedTable) -> KeyedTable {
    let mut out = a.clone();
    for (k, attrs) in b {
        out.entry(k.clone()).or_default().extend(attrs.iter().cloned());
    }
    out
}

/// Keyed tables that align when they share a key and merge by full join.
/// The carrier is the join closure of the generators.
#[derive(Debug, Clone)]
pub struct KeyedTableSystem {
    tables: Vec<KeyedTable>,
    table: Vec<Vec<Option<usize>>>,
}

impl KeyedTableSystem {
    pub fn from_generators(generators: Vec<KeyedTable>) -> Self {
        let mut tables: Vec<KeyedTable> = Vec::new();
        for g in generators {
            if !tables.contains(&g) {
                tables.push(g);
            }
        }
        let shares = |a: &KeyedTable, b: &KeyedTable| a.keys().any(|k| b.contains_key(k));
        let mut i = 0;
        while i < tables.len() {
            for j in 0..=i {
                for (x, y) in [(i, j), (j, i)] {
                    if shares(&tables[x], &tables[y]) {
                        let m = full_join(&tables[x], &tables[y]);
                        if !tables.contains(&m) {
                            tables.push(m);
                        }
                    }
                }
            }
            i += 1;
        }
        let n = tables.len();
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        shares(&tables[a], &tables[b]).then(|| {
                            let m = full_join(&tables[a], &tables[b]);
                            tables.iter().position(|t| *t == m).expect("closed")
                        })
                    })
                    .collect()
            })
            .collect();
        KeyedTableSystem { tables, table }
    }

    /// A small geographic example: rivers, cities and regions.
    pub fn geo() -> Self {
        let row = |a: &str, b: &str, attrs: &[&str]| {
            ((a.to_owned(), b.to_owned()), attrs.iter().map(|s| (*s).to_owned()).collect::<BTreeSet<_>>())
        };
        let t1: KeyedTable = [row("river", "city", &["flows_through"]), row("city", "region", &["located_in"])].into();
        let t2: KeyedTable = [row("river", "city", &["length_km"]), row("river", "sea", &["drains_into"])].into();
        let t3: KeyedTable = [row("city", "region", &["capital_of"])].into();
        let t4: KeyedTable = [row("mountain", "region", &["elevation_m"])].into();
        KeyedTableSystem::from_generators(vec![t1, t2, t3, t4])
    }

    pub fn table(&self, a: usize) -> &KeyedTable {
        &self.tables[a]
    }
}

impl MergingSystem for KeyedTableSystem {
    fn carrier_size(&self) -> usize {
        self.tables.len()
    }

    fn aligns(&self, a: usize, b: usize) -> bool {
        self.table[a][b].is_some()
    }

    fn merge(&self, a: usize, b: usize) -> MergeOutcome {
        match self.table[a][b] {
            Some(m) => MergeOutcome::Defined(m),
            None => MergeOutcome::Undefined,
        }
    }

    fn element_name(&self, a: usize) -> String {
        let keys: Vec<String> = self.tables[a].keys().map(|(x, y)| format!("{x}/{y}")).collect();
        format!("[{}]", keys.join(", "))
    }
}
