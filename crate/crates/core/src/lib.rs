//! Ontology merging systems.
//!
//! * [`ontology`]: finite ontologies, homomorphisms, homomorphism search and
//!   canonical forms.
//! * [`category`]: alignment pairs, pushouts, pullbacks and the morphisms
//!   between them.
//! * [`algebra`]: the abstract merging-system interface, its null extension
//!   and the natural order induced by merging.
//! * [`closure`]: merging closures of repositories, the closure poset and
//!   provenance.
//! * [`verify`]: exhaustive checks of the algebraic properties of a finite
//!   merging system.
//! * [`fixtures`]: small reference ontologies and fixture systems.
//! * [`random`]: seeded generators used by tests, benches and the audit mode.

pub mod algebra;
pub mod category;
pub mod closure;
pub mod error;
pub mod fixtures;
pub mod ontology;
pub mod random;
pub mod union_find;
pub mod verify;

pub use algebra::{
    evaluate_merge, natural_leq, null_extend, MergeOutcome, MergingSystem, NullExtendedSystem, OrderRelation,
    TableSystem,
};
pub use category::{
    coproduct, derive_alignments, induced_merge_hom, mediating_hom, pullback, pushout, AlignmentPairHom,
    Correspondence, PullbackResult, PushoutResult, VAlignmentPair,
};
pub use closure::{
    build_poset, compute_closure, poset_query, provenance_of, ClosureError, ClosureResult, ClosureSystem, Limits,
    MergeTree, Poset, PosetQuery, Repository,
};
pub use error::{AlgebraError, BudgetExceeded, CategoryError, HomError, ValidationError};
pub use ontology::{
    are_isomorphic, canonical_form, compose_homs, find_homomorphisms, validate, CanonicalKey, Concept, HomKind,
    Homomorphism, Ontology, RawOntology, Relation, SearchMode, SearchOutcome,
};
pub use verify::{
    check_order_theorem, check_property, verify_report, FullReport, Property, PropertyReport, VerifyError,
};
