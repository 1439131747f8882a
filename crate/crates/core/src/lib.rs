//! Structural invariants, constructive decompositions and a brute-force
//! interpretability oracle for second-order quantifiers over finite universes.
//!
//! A quantifier `∃_K` ranges over a family `K` of `n`-place relations on a
//! finite universe that is closed under permutations of the universe. This
//! crate computes, for a single relation `R` or a whole family, the monadic
//! content (`λ'₀`, `λ₀`), the one-to-one content (`λ₁`), and the packages
//! (supports, cores, encodings) through which `∃_R` factors, and it checks
//! interpretability and expressibility claims exhaustively at small sizes.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is a pure
//! function of immutable inputs; identical inputs give identical outputs
//! (ties are broken towards the lexicographically least candidate).
//!
//! Module map:
//!
//! * [`elements`], [`relation`], [`types`], [`canon`], [`family`]: universes,
//!   relations, basic types, canonical forms and the quantifier-family zoo.
//! * [`invariants`]: support sets and the numeric invariants.
//! * [`decompose`]: the constructive decompositions, each re-verified before
//!   it is returned.
//! * [`logic`]: formulas, the prefix syntax, the evaluator and the oracle.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod budget;
pub mod canon;
pub mod decompose;
pub mod elements;
pub mod error;
pub mod family;
pub mod invariants;
pub mod logic;
pub mod relation;
pub mod types;

pub(crate) mod combinatorics;

pub use budget::Budget;
pub use elements::{Elem, ElemSet, Permutation, Universe};
pub use error::{Error, Result};
pub use family::{Bound, Constraint, FamilyRef, QuantifierFamily};
pub use relation::{approx_eq, sum_relations, EquivalenceRelation, PartialInjection, Relation};
pub use types::{tp_bs, type_space, AtomicInstance, BasicType, Slot};
