//! Backtracking homomorphism search.
//!
//! Concepts are assigned one at a time in a connectivity-first order (BFS
//! over incident relations, ties broken by id order). After each assignment
//! every relation whose endpoints are both assigned must have at least one
//! candidate image with the same tag and the mapped endpoints. Relation
//! images are chosen only once the concept map is complete: they are
//! independent of each other, so counting multiplies candidate set sizes.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{Homomorphism, Ontology};
use crate::error::BudgetExceeded;

pub const DEFAULT_HOM_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    First,
    Count,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Homs(Vec<Homomorphism>),
    Count(u128),
}

impl SearchOutcome {
    pub fn homs(self) -> Vec<Homomorphism> {
        match self {
            SearchOutcome::Homs(h) => h,
            SearchOutcome::Count(_) => Vec::new(),
        }
    }

    pub fn count(&self) -> u128 {
        match self {
            SearchOutcome::Homs(h) => h.len() as u128,
            SearchOutcome::Count(n) => *n,
        }
    }
}

/// Entry point for homomorphism search.
pub fn find_homomorphisms(
    source: &Arc<Ontology>,
    target: &Arc<Ontology>,
    mode: SearchMode,
    budget: u64,
) -> Result<SearchOutcome, BudgetExceeded> {
    HomSearch::new(source.clone(), target.clone()).budget(budget).run(mode)
}

/// Configurable search, reusable for filtered enumeration.
pub struct HomSearch {
    source: Arc<Ontology>,
    target: Arc<Ontology>,
    budget: u64,
    fixed: Vec<Option<usize>>,
}

type EdgeKey<'a> = (usize, usize, Option<&'a str>);

struct Ctx<'a> {
    s: &'a Ontology,
    t: &'a Ontology,
    order: Vec<usize>,
    // relations of s whose later endpoint (in `order`) is order[k]
    checks: Vec<Vec<usize>>,
    // target relations by (src, dst, tag)
    by_ends: HashMap<EdgeKey<'a>, Vec<usize>>,
    fixed: &'a [Option<usize>],
    steps: u64,
    budget: u64,
    mode: SearchMode,
    count: u128,
    found: Vec<Homomorphism>,
    source: &'a Arc<Ontology>,
    target: &'a Arc<Ontology>,
}

impl HomSearch {
    pub fn new(source: Arc<Ontology>, target: Arc<Ontology>) -> Self {
        let n = source.concept_count();
        HomSearch { source, target, budget: DEFAULT_HOM_BUDGET, fixed: vec![None; n] }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Restricts concept `i` of the source to map to concept `j`.
    pub fn fix_concept(mut self, i: usize, j: usize) -> Self {
        self.fixed[i] = Some(j);
        self
    }

    pub fn run(&self, mode: SearchMode) -> Result<SearchOutcome, BudgetExceeded> {
        let s = &*self.source;
        let t = &*self.target;
        let order = assignment_order(s);
        let mut pos = vec![0; s.concept_count()];
        for (k, &c) in order.iter().enumerate() {
            pos[c] = k;
        }
        let mut checks = vec![Vec::new(); order.len()];
        for r in 0..s.relation_count() {
            let k = pos[s.src(r)].max(pos[s.dst(r)]);
            checks[k].push(r);
        }
        let mut by_ends: HashMap<EdgeKey<'_>, Vec<usize>> = HashMap::new();
        for r in 0..t.relation_count() {
            by_ends.entry((t.src(r), t.dst(r), t.relation_tag(r))).or_default().push(r);
        }
        let mut ctx = Ctx {
            s,
            t,
            order,
            checks,
            by_ends,
            fixed: &self.fixed,
            steps: 0,
            budget: self.budget,
            mode,
            count: 0,
            found: Vec::new(),
            source: &self.source,
            target: &self.target,
        };
        let mut assign = vec![usize::MAX; s.concept_count()];
        ctx.extend(0, &mut assign)?;
        Ok(match mode {
            SearchMode::Count => SearchOutcome::Count(ctx.count),
            _ => SearchOutcome::Homs(ctx.found),
        })
    }
}

/// Connectivity-first order: start from the lowest unvisited id, then BFS
/// through incident relations visiting neighbours in id order.
fn assignment_order(s: &Ontology) -> Vec<usize> {
    let n = s.concept_count();
    let mut adj = vec![Vec::new(); n];
    for r in 0..s.relation_count() {
        adj[s.src(r)].push(s.dst(r));
        adj[s.dst(r)].push(s.src(r));
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
    }
    order
}

impl<'a> Ctx<'a> {
    fn done(&self) -> bool {
        self.mode == SearchMode::First && !self.found.is_empty()
    }

    fn candidates(&self, r: usize, assign: &[usize]) -> &[usize] {
        let key = (assign[self.s.src(r)], assign[self.s.dst(r)], self.s.relation_tag(r));
        self.by_ends.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    fn extend(&mut self, k: usize, assign: &mut Vec<usize>) -> Result<(), BudgetExceeded> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(BudgetExceeded { budget: self.budget });
        }
        if k == self.order.len() {
            self.emit(assign)?;
            return Ok(());
        }
        let c = self.order[k];
        let tag = self.s.concept_tag(c);
        let range: Vec<usize> = match self.fixed[c] {
            Some(j) => vec![j],
            None => (0..self.t.concept_count()).collect(),
        };
        for j in range {
            if self.t.concept_tag(j) != tag {
                continue;
            }
            assign[c] = j;
            let ok = self.checks[k].iter().all(|&r| !self.candidates(r, assign).is_empty());
            if ok {
                self.extend(k + 1, assign)?;
                if self.done() {
                    break;
                }
            }
        }
        assign[c] = usize::MAX;
        Ok(())
    }

    fn emit(&mut self, assign: &[usize]) -> Result<(), BudgetExceeded> {
        let rels = self.s.relation_count();
        let cands: Vec<Vec<usize>> = (0..rels).map(|r| self.candidates(r, assign).to_vec()).collect();
        if self.mode == SearchMode::Count {
            let mut n: u128 = 1;
            for c in &cands {
                n = n.saturating_mul(c.len() as u128);
            }
            self.count = self.count.saturating_add(n);
            return Ok(());
        }
        let mut choice = vec![0usize; rels];
        loop {
            self.steps += 1;
            if self.steps > self.budget {
                return Err(BudgetExceeded { budget: self.budget });
            }
            let relation_map = choice.iter().enumerate().map(|(r, &i)| cands[r][i]).collect();
            self.found.push(Homomorphism::new_unchecked(
                self.source.clone(),
                self.target.clone(),
                assign.to_vec(),
                relation_map,
            ));
            if self.mode == SearchMode::First {
                return Ok(());
            }
            // odometer over relation choices, last relation fastest
            let mut r = rels;
            loop {
                if r == 0 {
                    return Ok(());
                }
                r -= 1;
                choice[r] += 1;
                if choice[r] < cands[r].len() {
                    break;
                }
                choice[r] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn count(s: &Ontology, t: &Ontology) -> u128 {
        find_homomorphisms(&Arc::new(s.clone()), &Arc::new(t.clone()), SearchMode::Count, DEFAULT_HOM_BUDGET)
            .unwrap()
            .count()
    }

    #[test]
    fn single_untagged_concept_maps_anywhere_untagged() {
        let one = Ontology::builder().concept("x", None).build().unwrap();
        let many = Ontology::builder().concept("a", None).concept("b", None).concept("c", None).build().unwrap();
        assert_eq!(count(&one, &many), 3);
    }

    #[test]
    fn student_has_no_image_in_employee() {
        assert_eq!(count(&fixtures::person_student(), &fixtures::person_employee()), 0);
    }

    #[test]
    fn person_student_embeds_uniquely_into_merge() {
        let ps = Arc::new(fixtures::person_student());
        let m = Arc::new(fixtures::merged_person());
        let homs = find_homomorphisms(&ps, &m, SearchMode::All, DEFAULT_HOM_BUDGET).unwrap().homs();
        assert_eq!(homs.len(), 1);
        let h = &homs[0];
        assert_eq!(m.concept_tag(h.map_concept(0)), Some("Person"));
        assert_eq!(m.concept_tag(h.map_concept(1)), Some("Student"));
    }

    #[test]
    fn empty_source_has_one_hom() {
        assert_eq!(count(&Ontology::empty(), &fixtures::person_student()), 1);
        assert_eq!(count(&Ontology::empty(), &Ontology::empty()), 1);
        assert_eq!(count(&fixtures::person_student(), &Ontology::empty()), 0);
    }

    #[test]
    fn parallel_edges_multiply() {
        let s = Ontology::builder().concept("a", None).relation("r", None, "a", "a").build().unwrap();
        let t = Ontology::builder()
            .concept("x", None)
            .relation("p", None, "x", "x")
            .relation("q", None, "x", "x")
            .build()
            .unwrap();
        assert_eq!(count(&s, &t), 2);
        let all = find_homomorphisms(&Arc::new(s), &Arc::new(t), SearchMode::All, 1000).unwrap();
        assert_eq!(all.count(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let s = Ontology::builder().concept("a", None).concept("b", None).concept("c", None).build().unwrap();
        let t = s.clone();
        let err = find_homomorphisms(&Arc::new(s), &Arc::new(t), SearchMode::All, 5).unwrap_err();
        assert_eq!(err.budget, 5);
    }

    #[test]
    fn first_mode_returns_at_most_one() {
        let s = Ontology::builder().concept("a", None).build().unwrap();
        let t = Ontology::builder().concept("x", None).concept("y", None).build().unwrap();
        let r = find_homomorphisms(&Arc::new(s), &Arc::new(t), SearchMode::First, 100).unwrap().homs();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].map_concept(0), 0);
    }
}
