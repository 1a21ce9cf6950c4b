//! Exhaustive property checks on finite merging systems.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{null_extend, MergeOutcome, MergingSystem, OrderRelation, TableSystem};
use crate::error::AlgebraError;

/// Carriers larger than this need [`CheckOptions::allow_large_carrier`].
pub const MAX_DEFAULT_CARRIER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    I,
    C,
    A,
    CA,
    SA,
    Rl,
    Rr,
    R,
    LU,
    CPl,
    CPr,
    CP,
}

impl Property {
    pub const ALL: [Property; 12] = [
        Property::I,
        Property::C,
        Property::A,
        Property::CA,
        Property::SA,
        Property::Rl,
        Property::Rr,
        Property::R,
        Property::LU,
        Property::CPl,
        Property::CPr,
        Property::CP,
    ];

    /// The properties that need no order.
    pub const ALGEBRAIC: [Property; 8] =
        [Property::I, Property::C, Property::A, Property::CA, Property::SA, Property::Rl, Property::Rr, Property::R];

    pub fn label(self) -> &'static str {
        match self {
            Property::I => "I",
            Property::C => "C",
            Property::A => "A",
            Property::CA => "CA",
            Property::SA => "SA",
            Property::Rl => "Rl",
            Property::Rr => "Rr",
            Property::R => "R",
            Property::LU => "LU",
            Property::CPl => "CPl",
            Property::CPr => "CPr",
            Property::CP => "CP",
        }
    }

    pub fn needs_order(self) -> bool {
        matches!(self, Property::LU | Property::CPl | Property::CPr | Property::CP)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown property `{s}`"))
    }
}

/// Elements witnessing a failure and the equation they violate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub elements: Vec<usize>,
    pub equation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl PropertyReport {
    fn pass(property: Property) -> Self {
        PropertyReport { property, holds: true, counterexample: None }
    }

    fn fail(property: Property, elements: Vec<usize>, equation: String) -> Self {
        PropertyReport { property, holds: false, counterexample: Some(Counterexample { elements, equation }) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("property {0} needs an order relation")]
    OrderRequired(Property),
    #[error("order relation has size {order} but the carrier has {carrier} elements")]
    OrderSizeMismatch { order: usize, carrier: usize },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("carrier of {0} elements exceeds the default limit of {MAX_DEFAULT_CARRIER}; pass the override")]
    CarrierTooLarge(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    pub allow_large_carrier: bool,
}

pub fn check_property<S: MergingSystem + ?Sized>(
    sys: &S,
    property: Property,
    order: Option<&OrderRelation>,
) -> Result<PropertyReport, VerifyError> {
    check_property_with(sys, property, order, CheckOptions::default())
}

pub fn check_property_with<S: MergingSystem + ?Sized>(
    sys: &S,
    property: Property,
    order: Option<&OrderRelation>,
    opts: CheckOptions,
) -> Result<PropertyReport, VerifyError> {
    let t = snapshot(sys, opts)?;
    check_on(&t, property, order)
}

fn snapshot<S: MergingSystem + ?Sized>(sys: &S, opts: CheckOptions) -> Result<TableSystem, VerifyError> {
    let n = sys.carrier_size();
    if n > MAX_DEFAULT_CARRIER && !opts.allow_large_carrier {
        return Err(VerifyError::CarrierTooLarge(n));
    }
    Ok(TableSystem::from_system(sys)?)
}

fn show(x: MergeOutcome) -> String {
    x.to_string()
}

fn check_on(t: &TableSystem, property: Property, order: Option<&OrderRelation>) -> Result<PropertyReport, VerifyError> {
    let n = t.carrier_size();
    let m = |a: usize, b: usize| t.merge(a, b);
    let m2 = |x: MergeOutcome, c: usize| match x {
        MergeOutcome::Defined(x) => t.merge(x, c),
        MergeOutcome::Undefined => MergeOutcome::Undefined,
    };
    let m2r = |a: usize, x: MergeOutcome| match x {
        MergeOutcome::Defined(x) => t.merge(a, x),
        MergeOutcome::Undefined => MergeOutcome::Undefined,
    };
    let ord = if property.needs_order() {
        let o = order.ok_or(VerifyError::OrderRequired(property))?;
        if o.size() != n {
            return Err(VerifyError::OrderSizeMismatch { order: o.size(), carrier: n });
        }
        Some(o)
    } else {
        None
    };
    use Property::*;
    let report = match property {
        I => (0..n)
            .find(|&a| m(a, a) != MergeOutcome::Defined(a))
            .map(|a| PropertyReport::fail(I, vec![a], format!("{a} ⋎ {a} = {} ≠ {a}", show(m(a, a)))))
            .unwrap_or_else(|| PropertyReport::pass(I)),
        C => {
            let mut r = PropertyReport::pass(C);
            'c: for a in 0..n {
                for b in 0..n {
                    if t.aligns(a, b) != t.aligns(b, a) {
                        r = PropertyReport::fail(C, vec![a, b], format!("{a} ∼ {b} but not {b} ∼ {a}"));
                        break 'c;
                    }
                    if m(a, b) != m(b, a) {
                        let eq = format!("{a} ⋎ {b} = {} ≠ {} = {b} ⋎ {a}", show(m(a, b)), show(m(b, a)));
                        r = PropertyReport::fail(C, vec![a, b], eq);
                        break 'c;
                    }
                }
            }
            r
        }
        A | CA | SA => scan_triples(n, |a, b, c| {
            let left = m2(m(a, b), c);
            let right = m2r(a, m(b, c));
            let eq = || format!("({a} ⋎ {b}) ⋎ {c} = {} vs {a} ⋎ ({b} ⋎ {c}) = {}", show(left), show(right));
            let ok = match property {
                A => !(left.is_defined() && right.is_defined()) || left == right,
                CA => !(t.aligns(a, b) && t.aligns(b, c)) || (left.is_defined() && left == right),
                _ => left == right,
            };
            if ok {
                None
            } else {
                Some(eq())
            }
        })
        .map(|(x, e)| PropertyReport::fail(property, x, e))
        .unwrap_or_else(|| PropertyReport::pass(property)),
        Rl | Rr | R => {
            let left_side = |a: usize, b: usize, o: usize| -> Option<String> {
                let x = m(a, b).defined()?;
                (t.aligns(o, a) && !t.aligns(o, x)).then(|| format!("{o} ∼ {a} but not {o} ∼ {x} = {a} ⋎ {b}"))
            };
            let right_side = |a: usize, b: usize, o: usize| -> Option<String> {
                let x = m(a, b).defined()?;
                (t.aligns(a, o) && !t.aligns(x, o))
                    .then(|| format!("{a} ∼ {o} but not {x} ∼ {o} where {x} = {a} ⋎ {b}"))
            };
            scan_triples(n, |a, b, o| match property {
                Rl => left_side(a, b, o),
                Rr => right_side(a, b, o),
                _ => left_side(a, b, o).or_else(|| right_side(a, b, o)),
            })
            .map(|(x, e)| PropertyReport::fail(property, x, e))
            .unwrap_or_else(|| PropertyReport::pass(property))
        }
        LU => {
            let o = ord.expect("checked");
            let mut r = PropertyReport::pass(LU);
            'lu: for a in 0..n {
                for b in 0..n {
                    let Some(x) = m(a, b).defined() else { continue };
                    if !o.leq(a, x) || !o.leq(b, x) {
                        r = PropertyReport::fail(LU, vec![a, b], format!("{x} = {a} ⋎ {b} is not an upper bound"));
                        break 'lu;
                    }
                    if let Some(u) = (0..n).find(|&u| o.leq(a, u) && o.leq(b, u) && !o.leq(x, u)) {
                        let eq = format!("{u} bounds {a} and {b} but {x} = {a} ⋎ {b} ⋠ {u}");
                        r = PropertyReport::fail(LU, vec![a, b, u], eq);
                        break 'lu;
                    }
                }
            }
            r
        }
        CPl | CPr | CP => {
            let o = ord.expect("checked");
            // (o1, o2, x): o1 ⪯ o2 and x aligned with o1 on the given side
            let left = |o1: usize, o2: usize, x: usize| -> Option<String> {
                if !(o.leq(o1, o2) && t.aligns(x, o1)) {
                    return None;
                }
                if !t.aligns(x, o2) {
                    return Some(format!("{o1} ⪯ {o2}, {x} ∼ {o1} but not {x} ∼ {o2}"));
                }
                let (p, q) = (m(x, o1).defined()?, m(x, o2).defined()?);
                (!o.leq(p, q)).then(|| format!("{o1} ⪯ {o2} but {x} ⋎ {o1} = {p} ⋠ {q} = {x} ⋎ {o2}"))
            };
            let right = |o1: usize, o2: usize, x: usize| -> Option<String> {
                if !(o.leq(o1, o2) && t.aligns(o1, x)) {
                    return None;
                }
                if !t.aligns(o2, x) {
                    return Some(format!("{o1} ⪯ {o2}, {o1} ∼ {x} but not {o2} ∼ {x}"));
                }
                let (p, q) = (m(o1, x).defined()?, m(o2, x).defined()?);
                (!o.leq(p, q)).then(|| format!("{o1} ⪯ {o2} but {o1} ⋎ {x} = {p} ⋠ {q} = {o2} ⋎ {x}"))
            };
            scan_triples(n, |a, b, c| match property {
                CPl => left(a, b, c),
                CPr => right(a, b, c),
                _ => left(a, b, c).or_else(|| right(a, b, c)),
            })
            .map(|(x, e)| PropertyReport::fail(property, x, e))
            .unwrap_or_else(|| PropertyReport::pass(property))
        }
    };
    Ok(report)
}

fn scan_triples(n: usize, mut f: impl FnMut(usize, usize, usize) -> Option<String>) -> Option<(Vec<usize>, String)> {
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if let Some(e) = f(a, b, c) {
                    return Some((vec![a, b, c], e));
                }
            }
        }
    }
    None
}

/// Every algebraic property, the null-extension semigroup check and the
/// audit of the implications between them.
#[derive(Debug, Clone)]
pub struct FullReport {
    pub reports: Vec<PropertyReport>,
    pub null_extension_associative: bool,
    /// Implications that the reports violate; nonempty only if the checker
    /// itself is inconsistent.
    pub implication_violations: Vec<String>,
}

impl FullReport {
    pub fn holds(&self, p: Property) -> bool {
        self.reports.iter().find(|r| r.property == p).map(|r| r.holds).expect("property reported")
    }

    pub fn get(&self, p: Property) -> &PropertyReport {
        self.reports.iter().find(|r| r.property == p).expect("property reported")
    }
}

pub fn verify_report<S: MergingSystem + ?Sized>(sys: &S) -> Result<FullReport, VerifyError> {
    verify_report_with(sys, CheckOptions::default())
}

pub fn verify_report_with<S: MergingSystem + ?Sized>(sys: &S, opts: CheckOptions) -> Result<FullReport, VerifyError> {
    let t = snapshot(sys, opts)?;
    let reports = Property::ALGEBRAIC.into_iter().map(|p| check_on(&t, p, None)).collect::<Result<Vec<_>, _>>()?;
    let null_extension_associative = null_extend(&t).is_semigroup();
    let mut report = FullReport { reports, null_extension_associative, implication_violations: Vec::new() };
    let h = |p| report.holds(p);
    let mut v = Vec::new();
    if h(Property::SA) && !h(Property::A) {
        v.push("SA holds but A fails".to_owned());
    }
    if h(Property::CA) && !h(Property::A) {
        v.push("CA holds but A fails".to_owned());
    }
    if h(Property::C) && h(Property::CA) != (h(Property::A) && h(Property::R)) {
        v.push("under C, CA differs from A ∧ R".to_owned());
    }
    if h(Property::R) != (h(Property::Rl) && h(Property::Rr)) {
        v.push("R differs from Rl ∧ Rr".to_owned());
    }
    if h(Property::SA) != report.null_extension_associative {
        v.push("SA differs from associativity of the null extension".to_owned());
    }
    report.implication_violations = v;
    Ok(report)
}

/// Both sides of the order characterisation for a given partial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderTheoremResult {
    /// LU ∧ CP.
    pub lhs: bool,
    /// I ∧ C ∧ A ∧ R ∧ (order = ≤_⋎).
    pub rhs: bool,
    pub agrees: bool,
    pub diagnosis: String,
}

pub fn check_order_theorem<S: MergingSystem + ?Sized>(
    sys: &S,
    order: &OrderRelation,
) -> Result<OrderTheoremResult, VerifyError> {
    let t = snapshot(sys, CheckOptions::default())?;
    let n = t.carrier_size();
    if order.size() != n {
        return Err(VerifyError::OrderSizeMismatch { order: order.size(), carrier: n });
    }
    if let Some(a) = (0..n).find(|&a| !t.aligns(a, a)) {
        return Err(VerifyError::PreconditionFailed(format!("∼ is not reflexive at {a}")));
    }
    for a in 0..n {
        for b in 0..n {
            if t.aligns(a, b) != t.aligns(b, a) {
                return Err(VerifyError::PreconditionFailed(format!("∼ is not commutative at ({a}, {b})")));
            }
        }
    }
    order
        .check_partial_order()
        .map_err(|e| VerifyError::PreconditionFailed(format!("order is not a partial order: {e}")))?;

    let mut failed = Vec::new();
    let mut holds = |p: Property, ord: Option<&OrderRelation>| -> Result<bool, VerifyError> {
        let r = check_on(&t, p, ord)?;
        if !r.holds {
            let e = r.counterexample.map(|c| c.equation).unwrap_or_default();
            failed.push(format!("{p}: {e}"));
        }
        Ok(r.holds)
    };
    let lu = holds(Property::LU, Some(order))?;
    let cp = holds(Property::CP, Some(order))?;
    let i = holds(Property::I, None)?;
    let c = holds(Property::C, None)?;
    let a = holds(Property::A, None)?;
    let r = holds(Property::R, None)?;
    let natural = OrderRelation::natural(&t)?;
    let mismatch =
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).find(|&(x, y)| natural.leq(x, y) != order.leq(x, y));
    if let Some((x, y)) = mismatch {
        failed.push(format!("order differs from ≤_⋎ at ({x}, {y})"));
    }
    let lhs = lu && cp;
    let rhs = i && c && a && r && mismatch.is_none();
    let diagnosis = if failed.is_empty() { "all conditions hold".to_owned() } else { failed.join("; ") };
    Ok(OrderTheoremResult { lhs, rhs, agrees: lhs == rhs, diagnosis })
}

/// A random finite system for auditing the checker: carrier of 3..=8
/// elements, each ordered pair aligned with probability `density`, each
/// aligned pair merged to a uniformly random element. With probability
/// `structured`, the table is instead a random union-closed family of sets
/// (which satisfies every property).
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, density: f64, structured: f64) -> TableSystem {
    if rng.gen_bool(structured) {
        return random_union_system(rng);
    }
    let n = rng.gen_range(3..=8);
    let sym = rng.gen_bool(0.5);
    let mut table = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if sym && b < a {
                table[a][b] = table[b][a];
            } else if rng.gen_bool(density) {
                table[a][b] = Some(rng.gen_range(0..n));
            }
        }
    }
    TableSystem::from_fn(n, |a, b| table[a][b]).expect("consistent by construction")
}

/// Union closure of a few random subsets of four atoms, sized 3..=8.
fn random_union_system<R: Rng + ?Sized>(rng: &mut R) -> TableSystem {
    loop {
        let gens = rng.gen_range(2..=4);
        let mut family: Vec<u8> = (0..gens).map(|_| rng.gen_range(1..16)).collect();
        family.sort_unstable();
        family.dedup();
        let mut i = 0;
        while i < family.len() {
            for j in 0..i {
                let u = family[i] | family[j];
                if !family.contains(&u) {
                    family.push(u);
                }
            }
            i += 1;
        }
        if !(3..=8).contains(&family.len()) {
            continue;
        }
        let index = |x: u8| family.iter().position(|&y| y == x).expect("closed");
        return TableSystem::from_fn(family.len(), |a, b| Some(index(family[a] | family[b]))).expect("total");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_semilattice(n: usize) -> TableSystem {
        TableSystem::from_fn(n, |a, b| Some(a.max(b))).unwrap()
    }

    #[test]
    fn semilattice_passes_everything() {
        let s = max_semilattice(4);
        let r = verify_report(&s).unwrap();
        assert!(r.reports.iter().all(|x| x.holds), "{:?}", r.reports);
        assert!(r.null_extension_associative);
        assert!(r.implication_violations.is_empty());
        let order = OrderRelation::natural(&s).unwrap();
        for p in [Property::LU, Property::CP] {
            assert!(check_property(&s, p, Some(&order)).unwrap().holds);
        }
    }

    #[test]
    fn order_is_required() {
        let s = max_semilattice(2);
        assert_eq!(check_property(&s, Property::LU, None), Err(VerifyError::OrderRequired(Property::LU)));
    }

    #[test]
    fn addition_mod_n_fails_idempotence() {
        let s = TableSystem::from_fn(3, |a, b| Some((a + b) % 3)).unwrap();
        let r = check_property(&s, Property::I, None).unwrap();
        assert!(!r.holds);
        assert_eq!(r.counterexample.unwrap().elements, vec![1]);
        assert!(check_property(&s, Property::SA, None).unwrap().holds);
    }

    #[test]
    fn a_is_vacuous_when_a_side_is_undefined() {
        // a chain 0 ≤ 1 ≤ 2 where 0 and 2 do not align: 0 ⋎ (1 ⋎ 2) is undefined
        let s = TableSystem::from_fn(3, |a, b| match (a, b) {
            (0, 0) => Some(0),
            (0, 1) | (1, 0) | (1, 1) => Some(1),
            (1, 2) | (2, 1) | (2, 2) => Some(2),
            _ => None,
        })
        .unwrap();
        assert!(check_property(&s, Property::A, None).unwrap().holds);
        assert!(!check_property(&s, Property::CA, None).unwrap().holds);
    }

    #[test]
    fn discrete_order_fails_lu_on_a_nontrivial_merge() {
        let s = max_semilattice(3);
        let r = check_order_theorem(&s, &OrderRelation::discrete(3)).unwrap();
        assert!(!r.lhs);
        assert!(!r.rhs);
        assert!(r.agrees);
        let r = check_order_theorem(&s, &OrderRelation::natural(&s).unwrap()).unwrap();
        assert!(r.lhs && r.rhs && r.agrees, "{}", r.diagnosis);
    }

    #[test]
    fn order_theorem_preconditions() {
        let s = TableSystem::from_fn(2, |a, b| (a == b || a == 0).then_some(a.max(b))).unwrap();
        let err = check_order_theorem(&s, &OrderRelation::discrete(2)).unwrap_err();
        assert!(matches!(err, VerifyError::PreconditionFailed(m) if m.contains("commutative")));
        let s = max_semilattice(2);
        let mut not_po = OrderRelation::discrete(2);
        not_po.set(0, 0, false);
        assert!(matches!(check_order_theorem(&s, &not_po), Err(VerifyError::PreconditionFailed(_))));
    }

    #[test]
    fn large_carriers_need_the_override() {
        let s = max_semilattice(MAX_DEFAULT_CARRIER + 1);
        assert_eq!(check_property(&s, Property::I, None), Err(VerifyError::CarrierTooLarge(201)));
        let opts = CheckOptions { allow_large_carrier: true };
        assert!(check_property_with(&s, Property::I, None, opts).unwrap().holds);
    }

    #[test]
    fn random_systems_are_valid_and_sized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_system(&mut rng, 0.6, 0.2);
            assert!((3..=8).contains(&s.carrier_size()));
            assert!(verify_report(&s).unwrap().implication_violations.is_empty());
        }
    }

    #[test]
    fn property_labels_parse() {
        for p in Property::ALL {
            assert_eq!(p.label().parse::<Property>().unwrap(), p);
        }
        assert_eq!("sa".parse::<Property>().unwrap(), Property::SA);
        assert!("X".parse::<Property>().is_err());
    }
}
