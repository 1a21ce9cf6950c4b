//! Merging closures of ontology repositories, the merge-order poset and
//! provenance trees.
//!
//! Members are iso classes, identified by canonical key. The alignment pool
//! holds, for each ordered pair of members, the join (union) of every
//! correspondence known between them; merging two aligned members means
//! taking the pushout along that join. Rounds compute all pool merges from a
//! snapshot, then add new members and the correspondences derived from each
//! merge (composition with the injections, plus the reflexive pair on the
//! result). The fixpoint is reached when a round changes nothing.
//!
//! A merge computed before the pool reached its final size may produce a
//! member that the final merge function never generates. Once the pool is
//! stable, members are therefore regenerated from the repository under the
//! final merge function, which yields the least closed set.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{MergeOutcome, MergingSystem};
use crate::category::{pushout_along, Correspondence, VAlignmentPair};
use crate::ontology::{canonical_labeling, find_homomorphisms, CanonicalKey, CanonicalLabeling, Ontology, SearchMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_members: usize,
    pub max_element_size: usize,
    pub max_rounds: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_members: 10_000, max_element_size: 512, max_rounds: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    MaxMembers,
    MaxElementSize,
    MaxRounds,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::MaxMembers => "max_members",
            LimitKind::MaxElementSize => "max_element_size",
            LimitKind::MaxRounds => "max_rounds",
        })
    }
}

#[derive(Debug, Clone, Error)]
pub enum ClosureError {
    #[error("repository is empty")]
    EmptyRepository,
    #[error("duplicate ontology name `{0}`")]
    DuplicateName(String),
    #[error("alignment between `{left}` and `{right}`: {reason}")]
    InvalidAlignment { left: String, right: String, reason: String },
    #[error("limit {limit} exceeded after {} members", partial.len())]
    LimitExceeded { limit: LimitKind, partial: Box<ClosureResult> },
    #[error("unknown member key `{0}`")]
    UnknownKey(String),
    #[error("member key `{0}` is ambiguous")]
    AmbiguousKey(String),
    #[error("closure is partial")]
    Incomplete,
    #[error("homomorphism search from `{left}` to `{right}` exceeded its budget of {budget} steps")]
    HomBudget { left: String, right: String, budget: u64 },
}

#[derive(Debug, Clone)]
struct RepoAlignment {
    left: usize,
    right: usize,
    pair: VAlignmentPair,
}

/// Named ontologies plus alignment pairs between them.
#[derive(Debug, Clone, Default)]
pub struct Repository {
    names: Vec<String>,
    ontologies: Vec<Arc<Ontology>>,
    alignments: Vec<RepoAlignment>,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, o: impl Into<Arc<Ontology>>) -> Result<usize, ClosureError> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(ClosureError::DuplicateName(name));
        }
        self.names.push(name);
        self.ontologies.push(o.into());
        Ok(self.names.len() - 1)
    }

    /// Registers `pair` as aligning ontology `left` with ontology `right`.
    pub fn align(&mut self, left: usize, right: usize, pair: VAlignmentPair) -> Result<(), ClosureError> {
        let bad = |reason: &str| ClosureError::InvalidAlignment {
            left: self.names.get(left).cloned().unwrap_or_else(|| left.to_string()),
            right: self.names.get(right).cloned().unwrap_or_else(|| right.to_string()),
            reason: reason.to_owned(),
        };
        if left >= self.len() || right >= self.len() {
            return Err(bad("operand is not in the repository"));
        }
        if **pair.left_target() != *self.ontologies[left] {
            return Err(bad("left leg does not target the left ontology"));
        }
        if **pair.right_target() != *self.ontologies[right] {
            return Err(bad("right leg does not target the right ontology"));
        }
        self.alignments.push(RepoAlignment { left, right, pair });
        Ok(())
    }

    pub fn align_names(&mut self, left: &str, right: &str, pair: VAlignmentPair) -> Result<(), ClosureError> {
        let idx = |n: &str| self.index_of(n).ok_or_else(|| ClosureError::UnknownKey(n.to_owned()));
        let (l, r) = (idx(left)?, idx(right)?);
        self.align(l, r, pair)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn ontology(&self, i: usize) -> &Arc<Ontology> {
        &self.ontologies[i]
    }

    pub fn alignments(&self) -> impl Iterator<Item = (usize, usize, &VAlignmentPair)> {
        self.alignments.iter().map(|a| (a.left, a.right, &a.pair))
    }
}

#[derive(Debug, Clone)]
pub struct ClosureMember {
    pub key: CanonicalKey,
    pub ontology: Arc<Ontology>,
    pub layer: usize,
    /// Repository names of this iso class (empty for derived members).
    pub names: Vec<String>,
}

impl ClosureMember {
    pub fn display_name(&self) -> String {
        self.names.first().cloned().unwrap_or_else(|| self.key.digest())
    }
}

/// Members sorted by (layer, canonical key), with the final pool and merge
/// table indexed by member position.
#[derive(Debug, Clone)]
pub struct ClosureResult {
    members: Vec<ClosureMember>,
    pool: BTreeMap<(usize, usize), Correspondence>,
    merges: BTreeMap<(usize, usize), usize>,
    provenance: Vec<Option<(usize, usize)>>,
    rounds: usize,
    complete: bool,
}

impl ClosureResult {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ClosureMember] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &ClosureMember {
        &self.members[i]
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn index_of_key(&self, key: &CanonicalKey) -> Option<usize> {
        self.members.iter().position(|m| &m.key == key)
    }

    /// Looks a member up by repository name, full digest or unique digest
    /// prefix.
    pub fn resolve(&self, name: &str) -> Result<usize, ClosureError> {
        resolve_in(self.members.iter().map(|m| (&m.names, m.key.digest())), name)
    }

    pub fn aligned(&self, a: usize, b: usize) -> bool {
        self.pool.contains_key(&(a, b))
    }

    pub fn correspondence(&self, a: usize, b: usize) -> Option<&Correspondence> {
        self.pool.get(&(a, b))
    }

    pub fn pool(&self) -> &BTreeMap<(usize, usize), Correspondence> {
        &self.pool
    }

    pub fn merge_of(&self, a: usize, b: usize) -> Option<usize> {
        self.merges.get(&(a, b)).copied()
    }

    pub fn merges(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.merges
    }

    /// The chosen minimal-layer decomposition of a derived member.
    pub fn decomposition(&self, m: usize) -> Option<(usize, usize)> {
        self.provenance[m]
    }

    /// Every decomposition `(l, r)` with `layer(l) + layer(r) = layer(m)`.
    pub fn minimal_decompositions(&self, m: usize) -> Vec<(usize, usize)> {
        let layer = self.members[m].layer;
        self.merges
            .iter()
            .filter(|&(&(l, r), &x)| x == m && self.members[l].layer + self.members[r].layer == layer)
            .map(|(&k, _)| k)
            .collect()
    }

    pub fn system(&self) -> ClosureSystem<'_> {
        ClosureSystem { closure: self }
    }
}

fn resolve_in<'a>(entries: impl Iterator<Item = (&'a Vec<String>, String)>, name: &str) -> Result<usize, ClosureError> {
    let entries: Vec<(&Vec<String>, String)> = entries.collect();
    if let Some(i) = entries.iter().position(|(names, _)| names.iter().any(|n| n == name)) {
        return Ok(i);
    }
    let hits: Vec<usize> = entries
        .iter()
        .enumerate()
        .filter(|(_, (_, d))| !name.is_empty() && d.starts_with(name))
        .map(|(i, _)| i)
        .collect();
    match hits.as_slice() {
        [i] => Ok(*i),
        [] => Err(ClosureError::UnknownKey(name.to_owned())),
        _ => Err(ClosureError::AmbiguousKey(name.to_owned())),
    }
}

/// A closure viewed as a finite merging system.
#[derive(Debug, Clone, Copy)]
pub struct ClosureSystem<'a> {
    closure: &'a ClosureResult,
}

impl MergingSystem for ClosureSystem<'_> {
    fn carrier_size(&self) -> usize {
        self.closure.len()
    }

    fn aligns(&self, a: usize, b: usize) -> bool {
        self.closure.aligned(a, b)
    }

    fn merge(&self, a: usize, b: usize) -> MergeOutcome {
        match self.closure.merge_of(a, b) {
            Some(m) => MergeOutcome::Defined(m),
            None => MergeOutcome::Undefined,
        }
    }

    fn element_name(&self, a: usize) -> String {
        self.closure.member(a).display_name()
    }
}

/// Worklist processing order within a round. The result does not depend
/// on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorklistOrder {
    #[default]
    Forward,
    Reversed,
}

pub fn compute_closure(repo: &Repository, limits: Limits) -> Result<ClosureResult, ClosureError> {
    compute_closure_ordered(repo, limits, WorklistOrder::Forward)
}

pub fn compute_closure_ordered(
    repo: &Repository,
    limits: Limits,
    order: WorklistOrder,
) -> Result<ClosureResult, ClosureError> {
    if repo.is_empty() {
        return Err(ClosureError::EmptyRepository);
    }
    let mut e = Engine::new(limits);
    let mut generators = Vec::new();
    let mut names: HashMap<usize, Vec<String>> = HashMap::new();
    let mut transports = Vec::new();
    for i in 0..repo.len() {
        let o = repo.ontology(i);
        if o.element_count() > limits.max_element_size {
            return Err(e.limit(LimitKind::MaxElementSize, &generators, &names));
        }
        let (m, iso) = e.intern((**o).clone());
        names.entry(m).or_default().push(repo.name(i).to_owned());
        if !generators.contains(&m) {
            generators.push(m);
        }
        transports.push((m, iso));
    }
    for &m in &generators {
        let id = Correspondence::identity(&e.members[m]);
        e.add_pool(m, m, id);
    }
    for (l, r, pair) in repo.alignments() {
        let (ml, il) = &transports[l];
        let (mr, ir) = &transports[r];
        let c = pair.correspondence();
        let moved = Correspondence {
            concepts: c.concepts.iter().map(|&(x, y)| (il.0[x], ir.0[y])).collect(),
            relations: c.relations.iter().map(|&(x, y)| (il.1[x], ir.1[y])).collect(),
        };
        e.add_pool(*ml, *mr, moved);
    }

    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > limits.max_rounds {
            return Err(e.limit(LimitKind::MaxRounds, &generators, &names));
        }
        let snapshot = e.pool.clone();
        let mut by_right: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in snapshot.keys() {
            by_right.entry(b).or_default().push(a);
        }
        let members_before = e.members.len();
        let mut derived: Vec<(usize, usize, Correspondence)> = Vec::new();
        let mut work: Vec<(&(usize, usize), &Correspondence)> = snapshot.iter().collect();
        if order == WorklistOrder::Reversed {
            work.reverse();
        }
        for (&(a, b), corr) in work {
            let out = match e.merge(a, b, corr) {
                Some(out) => out,
                None => return Err(e.limit(LimitKind::MaxElementSize, &generators, &names)),
            };
            for (operand, inject) in [(a, &out.left), (b, &out.right)] {
                for &o in by_right.get(&operand).into_iter().flatten() {
                    let known = &snapshot[&(o, operand)];
                    derived.push((o, out.member, lift(known, inject)));
                }
            }
            let id = Correspondence::identity(&e.members[out.member]);
            derived.push((out.member, out.member, id));
            if e.members.len() > limits.max_members {
                return Err(e.limit(LimitKind::MaxMembers, &generators, &names));
            }
        }
        let mut changed = e.members.len() != members_before;
        for (a, b, c) in derived {
            changed |= e.add_pool(a, b, c);
        }
        if !changed {
            break;
        }
    }
    Ok(e.finish(&generators, &names, rounds, true))
}

/// `{(x, inject(y)) : (x, y) ∈ known}`.
fn lift(known: &Correspondence, inject: &Maps) -> Correspondence {
    Correspondence {
        concepts: known.concepts.iter().map(|&(x, y)| (x, inject.0[y])).collect(),
        relations: known.relations.iter().map(|&(x, y)| (x, inject.1[y])).collect(),
    }
}

/// Concept and relation index maps.
type Maps = (Vec<usize>, Vec<usize>);

#[derive(Clone)]
struct MergeOut {
    member: usize,
    left: Maps,
    right: Maps,
}

struct Engine {
    limits: Limits,
    members: Vec<Arc<Ontology>>,
    labelings: Vec<CanonicalLabeling>,
    index: HashMap<CanonicalKey, usize>,
    pool: BTreeMap<(usize, usize), Correspondence>,
    cache: HashMap<(usize, usize, Correspondence), MergeOut>,
}

impl Engine {
    fn new(limits: Limits) -> Self {
        Engine {
            limits,
            members: Vec::new(),
            labelings: Vec::new(),
            index: HashMap::new(),
            pool: BTreeMap::new(),
            cache: HashMap::new(),
        }
    }

    /// Member index of `o`'s iso class and an isomorphism from `o` onto the
    /// representative.
    fn intern(&mut self, o: Ontology) -> (usize, Maps) {
        let lo = canonical_labeling(&o);
        if let Some(&m) = self.index.get(&lo.key) {
            let lr = &self.labelings[m];
            let mut c = vec![0; o.concept_count()];
            for (i, &x) in lo.concept_order.iter().enumerate() {
                c[x] = lr.concept_order[i];
            }
            let mut r = vec![0; o.relation_count()];
            for (i, &x) in lo.relation_order.iter().enumerate() {
                r[x] = lr.relation_order[i];
            }
            return (m, (c, r));
        }
        let id = ((0..o.concept_count()).collect(), (0..o.relation_count()).collect());
        let m = self.members.len();
        self.index.insert(lo.key.clone(), m);
        self.labelings.push(lo);
        self.members.push(Arc::new(o));
        (m, id)
    }

    /// Adds `c` to the join for `(a, b)` and its transpose to `(b, a)`.
    /// Returns whether the pool grew.
    fn add_pool(&mut self, a: usize, b: usize, c: Correspondence) -> bool {
        let t = c.transpose();
        let mut grew = false;
        for (k, c) in [((a, b), c), ((b, a), t)] {
            match self.pool.get_mut(&k) {
                Some(existing) => {
                    if !c.is_subset(existing) {
                        existing.union_with(&c);
                        grew = true;
                    }
                }
                None => {
                    self.pool.insert(k, c);
                    grew = true;
                }
            }
        }
        grew
    }

    /// `None` when the result exceeds the element-size limit.
    fn merge(&mut self, a: usize, b: usize, corr: &Correspondence) -> Option<MergeOut> {
        let key = (a, b, corr.clone());
        if let Some(out) = self.cache.get(&key) {
            return Some(out.clone());
        }
        let po = pushout_along(&self.members[a], &self.members[b], corr);
        if po.merged.element_count() > self.limits.max_element_size {
            return None;
        }
        let (m, iso) = self.intern((*po.merged).clone());
        let through = |h: &crate::ontology::Homomorphism| -> Maps {
            (h.concept_map().iter().map(|&x| iso.0[x]).collect(), h.relation_map().iter().map(|&x| iso.1[x]).collect())
        };
        let out = MergeOut { member: m, left: through(&po.inject_left), right: through(&po.inject_right) };
        self.cache.insert(key, out.clone());
        Some(out)
    }

    fn limit(&self, limit: LimitKind, generators: &[usize], names: &HashMap<usize, Vec<String>>) -> ClosureError {
        let partial = self.snapshot_result(generators, names, 0, false, None);
        ClosureError::LimitExceeded { limit, partial: Box::new(partial) }
    }

    /// Regenerates members from the generators under the final merge
    /// function and packages the result.
    fn finish(
        &self,
        generators: &[usize],
        names: &HashMap<usize, Vec<String>>,
        rounds: usize,
        complete: bool,
    ) -> ClosureResult {
        let mut keep: HashSet<usize> = generators.iter().copied().collect();
        loop {
            let mut grew = false;
            for (&(a, b), corr) in &self.pool {
                if keep.contains(&a) && keep.contains(&b) {
                    let m = self.cache[&(a, b, corr.clone())].member;
                    grew |= keep.insert(m);
                }
            }
            if !grew {
                break;
            }
        }
        self.snapshot_result(generators, names, rounds, complete, Some(&keep))
    }

    fn snapshot_result(
        &self,
        generators: &[usize],
        names: &HashMap<usize, Vec<String>>,
        rounds: usize,
        complete: bool,
        keep: Option<&HashSet<usize>>,
    ) -> ClosureResult {
        let kept = |m: usize| keep.is_none_or(|k| k.contains(&m));
        // merge table over kept members, from merges actually computed
        let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&(a, b), corr) in &self.pool {
            if !(kept(a) && kept(b)) {
                continue;
            }
            if let Some(out) = self.cache.get(&(a, b, corr.clone())) {
                if kept(out.member) {
                    table.insert((a, b), out.member);
                }
            }
        }
        let n = self.members.len();
        let mut layer = vec![usize::MAX; n];
        for &g in generators {
            layer[g] = 1;
        }
        loop {
            let mut changed = false;
            for (&(a, b), &m) in &table {
                if layer[a] == usize::MAX || layer[b] == usize::MAX {
                    continue;
                }
                let l = layer[a] + layer[b];
                if l < layer[m] {
                    layer[m] = l;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut order: Vec<usize> = (0..n).filter(|&m| kept(m) && layer[m] != usize::MAX).collect();
        order.sort_by(|&x, &y| (layer[x], &self.labelings[x].key).cmp(&(layer[y], &self.labelings[y].key)));
        let mut pos = vec![usize::MAX; n];
        for (i, &m) in order.iter().enumerate() {
            pos[m] = i;
        }
        let members: Vec<ClosureMember> = order
            .iter()
            .map(|&m| ClosureMember {
                key: self.labelings[m].key.clone(),
                ontology: self.members[m].clone(),
                layer: layer[m],
                names: names.get(&m).cloned().unwrap_or_default(),
            })
            .collect();
        let pool: BTreeMap<(usize, usize), Correspondence> = self
            .pool
            .iter()
            .filter(|(&(a, b), _)| pos[a] != usize::MAX && pos[b] != usize::MAX)
            .map(|(&(a, b), c)| ((pos[a], pos[b]), c.clone()))
            .collect();
        let merges: BTreeMap<(usize, usize), usize> = table
            .iter()
            .filter(|(&(a, b), &m)| pos[a] != usize::MAX && pos[b] != usize::MAX && pos[m] != usize::MAX)
            .map(|(&(a, b), &m)| ((pos[a], pos[b]), pos[m]))
            .collect();
        let mut provenance = vec![None; members.len()];
        for (&(l, r), &m) in &merges {
            if members[m].layer == 1 || provenance[m].is_some() {
                continue;
            }
            if members[l].layer + members[r].layer == members[m].layer {
                provenance[m] = Some((l, r));
            }
        }
        ClosureResult { members, pool, merges, provenance, rounds, complete }
    }
}

/// A minimal-layer derivation of a closure member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeTree {
    Leaf { member: usize },
    Merge { member: usize, left: Box<MergeTree>, right: Box<MergeTree> },
}

impl MergeTree {
    pub fn member(&self) -> usize {
        match self {
            MergeTree::Leaf { member } | MergeTree::Merge { member, .. } => *member,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            MergeTree::Leaf { .. } => 1,
            MergeTree::Merge { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            MergeTree::Leaf { .. } => 0,
            MergeTree::Merge { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Parenthesised form, e.g. `(PS ⊔ PE)`.
    pub fn render(&self, name: &impl Fn(usize) -> String) -> String {
        match self {
            MergeTree::Leaf { member } => name(*member),
            MergeTree::Merge { left, right, .. } => format!("({} ⊔ {})", left.render(name), right.render(name)),
        }
    }
}

pub fn provenance_of(closure: &ClosureResult, key: &str) -> Result<MergeTree, ClosureError> {
    let m = closure.resolve(key)?;
    Ok(tree(closure, m))
}

fn tree(closure: &ClosureResult, m: usize) -> MergeTree {
    match closure.decomposition(m) {
        None => MergeTree::Leaf { member: m },
        Some((l, r)) => {
            MergeTree::Merge { member: m, left: Box::new(tree(closure, l)), right: Box::new(tree(closure, r)) }
        }
    }
}

/// Homomorphism order on closure members.
#[derive(Debug, Clone)]
pub struct Poset {
    names: Vec<Vec<String>>,
    keys: Vec<CanonicalKey>,
    layers: Vec<usize>,
    leq: Vec<Vec<bool>>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    hasse: Vec<(usize, usize)>,
}

pub fn build_poset(closure: &ClosureResult, hom_budget: u64) -> Result<Poset, ClosureError> {
    if !closure.is_complete() {
        return Err(ClosureError::Incomplete);
    }
    let n = closure.len();
    let mut leq = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (&closure.member(a).ontology, &closure.member(b).ontology);
            leq[a][b] = a == b
                || !find_homomorphisms(x, y, SearchMode::First, hom_budget)
                    .map_err(|e| ClosureError::HomBudget {
                        left: closure.member(a).display_name(),
                        right: closure.member(b).display_name(),
                        budget: e.budget,
                    })?
                    .homs()
                    .is_empty();
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        if class_of[a] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let group: Vec<usize> = (a..n).filter(|&b| leq[a][b] && leq[b][a]).collect();
        for &b in &group {
            class_of[b] = id;
        }
        classes.push(group);
    }
    let k = classes.len();
    let cl = |c: usize, d: usize| c != d && leq[classes[c][0]][classes[d][0]];
    let mut hasse = Vec::new();
    for c in 0..k {
        for d in 0..k {
            if cl(c, d) && !(0..k).any(|e| cl(c, e) && cl(e, d)) {
                hasse.push((c, d));
            }
        }
    }
    Ok(Poset {
        names: closure.members().iter().map(|m| m.names.clone()).collect(),
        keys: closure.members().iter().map(|m| m.key.clone()).collect(),
        layers: closure.members().iter().map(|m| m.layer).collect(),
        leq,
        class_of,
        classes,
        hasse,
    })
}

impl Poset {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> &CanonicalKey {
        &self.keys[i]
    }

    pub fn layer(&self, i: usize) -> usize {
        self.layers[i]
    }

    /// A homomorphism `a → b` exists.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    /// Hom-equivalence classes, each sorted, numbered by least member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Covering edges between classes.
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn resolve(&self, name: &str) -> Result<usize, ClosureError> {
        resolve_in(self.names.iter().zip(self.keys.iter().map(CanonicalKey::digest)), name)
    }

    fn class_members(&self, pick: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut out: Vec<usize> =
            (0..self.classes.len()).filter(|&c| pick(c)).flat_map(|c| self.classes[c].clone()).collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosetQuery {
    Maximal,
    Minimal,
    Sort,
    Above(String),
    Below(String),
}

/// Member indices answering `query`, in closure order (or the linear
/// extension for `Sort`).
pub fn poset_query(poset: &Poset, query: &PosetQuery) -> Result<Vec<usize>, ClosureError> {
    let k = poset.classes.len();
    Ok(match query {
        PosetQuery::Maximal => poset.class_members(|c| !poset.hasse.iter().any(|&(x, _)| x == c)),
        PosetQuery::Minimal => poset.class_members(|c| !poset.hasse.iter().any(|&(_, y)| y == c)),
        PosetQuery::Above(key) => {
            let a = poset.resolve(key)?;
            (0..poset.len()).filter(|&b| poset.leq(a, b)).collect()
        }
        PosetQuery::Below(key) => {
            let a = poset.resolve(key)?;
            (0..poset.len()).filter(|&b| poset.leq(b, a)).collect()
        }
        PosetQuery::Sort => {
            // Kahn over classes; classes are numbered by least member, and
            // members are in (layer, key) order, so the smallest ready class
            // id is the (layer, key) priority
            let mut indeg = vec![0usize; k];
            for &(_, d) in &poset.hasse {
                indeg[d] += 1;
            }
            let mut ready: BinaryHeap<Reverse<usize>> = (0..k).filter(|&c| indeg[c] == 0).map(Reverse).collect();
            let mut out = Vec::with_capacity(poset.len());
            while let Some(Reverse(c)) = ready.pop() {
                out.extend(poset.classes[c].iter().copied());
                for &(x, d) in &poset.hasse {
                    if x == c {
                        indeg[d] -= 1;
                        if indeg[d] == 0 {
                            ready.push(Reverse(d));
                        }
                    }
                }
            }
            out
        }
    })
}
