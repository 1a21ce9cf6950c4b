//! Abstract merging systems `(carrier, ∼, ⋎)` over finite carriers.
//!
//! Elements are carrier indices `0..carrier_size()`. Element equality is
//! index equality; systems whose elements are only defined up to some
//! equivalence (iso classes of ontologies) deduplicate before indexing.

use std::fmt;

use crate::error::AlgebraError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MergeOutcome {
    Defined(usize),
    Undefined,
}

impl MergeOutcome {
    pub fn defined(self) -> Option<usize> {
        match self {
            MergeOutcome::Defined(x) => Some(x),
            MergeOutcome::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, MergeOutcome::Defined(_))
    }
}

impl fmt::Display for MergeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MergeOutcome::Defined(x) => write!(f, "{x}"),
            MergeOutcome::Undefined => f.write_str("↑"),
        }
    }
}

/// A finite merging system. `merge(a, b)` must be defined exactly when
/// `aligns(a, b)` holds.
pub trait MergingSystem {
    fn carrier_size(&self) -> usize;
    fn aligns(&self, a: usize, b: usize) -> bool;
    fn merge(&self, a: usize, b: usize) -> MergeOutcome;

    fn element_name(&self, a: usize) -> String {
        a.to_string()
    }
}

impl<S: MergingSystem + ?Sized> MergingSystem for &S {
    fn carrier_size(&self) -> usize {
        (**self).carrier_size()
    }
    fn aligns(&self, a: usize, b: usize) -> bool {
        (**self).aligns(a, b)
    }
    fn merge(&self, a: usize, b: usize) -> MergeOutcome {
        (**self).merge(a, b)
    }
    fn element_name(&self, a: usize) -> String {
        (**self).element_name(a)
    }
}

/// Checked merge: validates membership and the "defined iff aligned"
/// contract.
pub fn evaluate_merge<S: MergingSystem + ?Sized>(sys: &S, a: usize, b: usize) -> Result<MergeOutcome, AlgebraError> {
    let n = sys.carrier_size();
    for x in [a, b] {
        if x >= n {
            return Err(AlgebraError::UnknownElement(x));
        }
    }
    let out = sys.merge(a, b);
    match (sys.aligns(a, b), out) {
        (true, MergeOutcome::Defined(c)) if c >= n => Err(AlgebraError::ResultOutsideCarrier(a, b, c)),
        (true, MergeOutcome::Defined(_)) | (false, MergeOutcome::Undefined) => Ok(out),
        _ => Err(AlgebraError::InconsistentTable(a, b)),
    }
}

/// `a ≤ b` iff `a ∼ b`, `b ∼ a` and `a ⋎ b = b ⋎ a = b`.
pub fn natural_leq<S: MergingSystem + ?Sized>(sys: &S, a: usize, b: usize) -> Result<bool, AlgebraError> {
    let ab = evaluate_merge(sys, a, b)?;
    let ba = evaluate_merge(sys, b, a)?;
    Ok(ab == MergeOutcome::Defined(b) && ba == MergeOutcome::Defined(b))
}

/// An explicit merge table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSystem {
    names: Vec<String>,
    table: Vec<Vec<Option<usize>>>,
}

impl TableSystem {
    /// `table[a][b]` is the merge of `a` and `b`; `aligns[a][b]` must be true
    /// exactly where it is `Some`.
    pub fn new(aligns: Vec<Vec<bool>>, table: Vec<Vec<Option<usize>>>) -> Result<Self, AlgebraError> {
        let n = table.len();
        for a in 0..n {
            for b in 0..n {
                match (aligns[a][b], table[a][b]) {
                    (true, Some(c)) if c >= n => return Err(AlgebraError::ResultOutsideCarrier(a, b, c)),
                    (true, Some(_)) | (false, None) => {}
                    _ => return Err(AlgebraError::InconsistentTable(a, b)),
                }
            }
        }
        Ok(TableSystem { names: (0..n).map(|i| i.to_string()).collect(), table })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Option<usize>) -> Result<Self, AlgebraError> {
        let table: Vec<Vec<Option<usize>>> = (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect();
        let aligns = table.iter().map(|row| row.iter().map(Option::is_some).collect()).collect();
        TableSystem::new(aligns, table)
    }

    /// Snapshot of any system.
    pub fn from_system<S: MergingSystem + ?Sized>(sys: &S) -> Result<Self, AlgebraError> {
        let n = sys.carrier_size();
        let mut table = vec![vec![None; n]; n];
        for (a, row) in table.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                *cell = evaluate_merge(sys, a, b)?.defined();
            }
        }
        let names = (0..n).map(|a| sys.element_name(a)).collect();
        Ok(TableSystem { names, table })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.table.len());
        self.names = names;
        self
    }
}

impl MergingSystem for TableSystem {
    fn carrier_size(&self) -> usize {
        self.table.len()
    }

    fn aligns(&self, a: usize, b: usize) -> bool {
        self.table[a][b].is_some()
    }

    fn merge(&self, a: usize, b: usize) -> MergeOutcome {
        match self.table[a][b] {
            Some(c) => MergeOutcome::Defined(c),
            None => MergeOutcome::Undefined,
        }
    }

    fn element_name(&self, a: usize) -> String {
        self.names[a].clone()
    }
}

/// The null extension: carrier plus an absorbing `↑` at index
/// `base_size()`, with a total operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullExtendedSystem {
    n: usize,
    table: Vec<Vec<usize>>,
    aligns: Vec<Vec<bool>>,
}

pub fn null_extend<S: MergingSystem + ?Sized>(sys: &S) -> NullExtendedSystem {
    let n = sys.carrier_size();
    let up = n;
    let mut table = vec![vec![up; n + 1]; n + 1];
    let mut aligns = vec![vec![false; n + 1]; n + 1];
    for a in 0..n {
        for b in 0..n {
            if let MergeOutcome::Defined(c) = sys.merge(a, b) {
                table[a][b] = c;
            }
            aligns[a][b] = sys.aligns(a, b);
        }
    }
    aligns[up][up] = true;
    NullExtendedSystem { n, table, aligns }
}

impl NullExtendedSystem {
    pub fn undefined(&self) -> usize {
        self.n
    }

    pub fn base_size(&self) -> usize {
        self.n
    }

    pub fn carrier_size(&self) -> usize {
        self.n + 1
    }

    pub fn aligns(&self, a: usize, b: usize) -> bool {
        self.aligns[a][b]
    }

    pub fn merge(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// First triple violating associativity of the total operation.
    pub fn associativity_counterexample(&self) -> Option<(usize, usize, usize)> {
        let m = self.n + 1;
        for a in 0..m {
            for b in 0..m {
                let ab = self.table[a][b];
                for c in 0..m {
                    if self.table[ab][c] != self.table[a][self.table[b][c]] {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_semigroup(&self) -> bool {
        self.associativity_counterexample().is_none()
    }
}

/// A binary relation on carrier indices, used for order arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderRelation {
    n: usize,
    bits: Vec<bool>,
}

impl OrderRelation {
    pub fn empty(n: usize) -> Self {
        OrderRelation { n, bits: vec![false; n * n] }
    }

    /// Only the reflexive pairs.
    pub fn discrete(n: usize) -> Self {
        Self::from_fn(n, |a, b| a == b)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.bits[a * n + b] = f(a, b);
            }
        }
        r
    }

    /// `≤_⋎` of a system.
    pub fn natural<S: MergingSystem + ?Sized>(sys: &S) -> Result<Self, AlgebraError> {
        let n = sys.carrier_size();
        let mut r = Self::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.bits[a * n + b] = natural_leq(sys, a, b)?;
            }
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.n + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: bool) {
        self.bits[a * self.n + b] = v;
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| (0..self.n).map(move |b| (a, b))).filter(|&(a, b)| self.leq(a, b))
    }

    /// Pairs `a < b` with nothing strictly between.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let lt = |a: usize, b: usize| a != b && self.leq(a, b);
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if lt(a, b) && !(0..self.n).any(|c| lt(a, c) && lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `Err` names the first failing law.
    pub fn check_partial_order(&self) -> Result<(), String> {
        let n = self.n;
        for a in 0..n {
            if !self.leq(a, a) {
                return Err(format!("not reflexive at {a}"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err(format!("not antisymmetric at ({a}, {b})"));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.leq(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.leq(b, c) && !self.leq(a, c) {
                        return Err(format!("not transitive at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_semilattice(n: usize) -> TableSystem {
        TableSystem::from_fn(n, |a, b| Some(a.max(b))).unwrap()
    }

    #[test]
    fn evaluate_checks_membership_and_contract() {
        let s = max_semilattice(3);
        assert_eq!(evaluate_merge(&s, 0, 2), Ok(MergeOutcome::Defined(2)));
        assert_eq!(evaluate_merge(&s, 0, 3), Err(AlgebraError::UnknownElement(3)));
        let bad = TableSystem::new(vec![vec![true]], vec![vec![None]]);
        assert_eq!(bad, Err(AlgebraError::InconsistentTable(0, 0)));
        let outside = TableSystem::new(vec![vec![true]], vec![vec![Some(4)]]);
        assert_eq!(outside, Err(AlgebraError::ResultOutsideCarrier(0, 0, 4)));
    }

    #[test]
    fn null_extension_is_absorbing_and_agrees() {
        let s = TableSystem::from_fn(3, |a, b| if a + b < 3 { Some(a.max(b)) } else { None }).unwrap();
        let e = null_extend(&s);
        let up = e.undefined();
        for a in 0..=3 {
            assert_eq!(e.merge(a, up), up);
            assert_eq!(e.merge(up, a), up);
        }
        assert_eq!(e.merge(0, 2), 2);
        assert_eq!(e.merge(1, 2), up);
        assert!(e.aligns(up, up));
        assert!(!e.aligns(0, up));
    }

    #[test]
    fn natural_order_of_max_is_numeric() {
        let s = max_semilattice(4);
        let r = OrderRelation::natural(&s).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(r.leq(a, b), a <= b);
            }
        }
        assert!(r.check_partial_order().is_ok());
        assert_eq!(r.covering_pairs(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn partial_order_check_names_the_law() {
        let mut r = OrderRelation::discrete(3);
        assert!(r.check_partial_order().is_ok());
        r.set(0, 1, true);
        r.set(1, 2, true);
        assert!(r.check_partial_order().unwrap_err().starts_with("not transitive"));
        r.set(1, 0, true);
        assert!(r.check_partial_order().unwrap_err().starts_with("not antisymmetric"));
    }
}
