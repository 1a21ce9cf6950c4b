//! Error types shared across the crate.

use std::fmt;

use thiserror::Error;

/// A single structural problem found while validating raw ontology data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateConceptId(String),
    DuplicateRelationId(String),
    DanglingSrc { relation: String, concept: String },
    DanglingDst { relation: String, concept: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateConceptId(id) => write!(f, "duplicate concept id `{id}`"),
            Violation::DuplicateRelationId(id) => write!(f, "duplicate relation id `{id}`"),
            Violation::DanglingSrc { relation, concept } => {
                write!(f, "dangling src: relation `{relation}` references missing concept `{concept}`")
            }
            Violation::DanglingDst { relation, concept } => {
                write!(f, "dangling dst: relation `{relation}` references missing concept `{concept}`")
            }
        }
    }
}

/// All violations found in one candidate ontology.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid ontology: {}", join_violations(.violations))]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Reasons a pair of maps fails to be an ontology homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("not total: {kind} `{id}` has no image")]
    NotTotal { kind: ElementKind, id: String },
    #[error("unknown {kind} `{id}` in map")]
    UnknownElement { kind: ElementKind, id: String },
    #[error("tag mismatch: {kind} `{from}` ({}) mapped to `{to}` ({})", show_tag(.from_tag), show_tag(.to_tag))]
    TagMismatch { kind: ElementKind, from: String, to: String, from_tag: Option<String>, to_tag: Option<String> },
    #[error("incidence violated: relation `{relation}` {end} endpoint not preserved")]
    IncidenceViolated { relation: String, end: &'static str },
    #[error("map length does not match source ({kind})")]
    WrongArity { kind: ElementKind },
}

fn show_tag(t: &Option<String>) -> &str {
    t.as_deref().unwrap_or("untagged")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Concept,
    Relation,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::Concept => "concept",
            ElementKind::Relation => "relation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("domain mismatch: {0}")]
    DomainMismatch(&'static str),
    #[error("cocone does not commute with the alignment pair")]
    CoconeDoesNotCommute,
    #[error(transparent)]
    Hom(#[from] HomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("homomorphism search exceeded its budget of {budget} steps")]
pub struct BudgetExceeded {
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element {0} is not in the carrier")]
    UnknownElement(usize),
    #[error("merge({0}, {1}) is defined iff aligns({0}, {1}) does not hold")]
    InconsistentTable(usize, usize),
    #[error("merge({0}, {1}) produced element {2} outside the carrier")]
    ResultOutsideCarrier(usize, usize, usize),
}
