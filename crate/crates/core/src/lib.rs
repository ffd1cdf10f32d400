//! Finite Γ-semigroups with exact-rational fuzzy subsets.
//!
//! The crate decides generalized fuzzy subsemigroup and bi-ideal predicates
//! (the `(alpha, beta)` family built from the `in` and quasi-coincidence
//! relations), checks the equivalence and characterization theorems on
//! concrete inputs, and searches small structures for separating witnesses.
//!
//! All grades are reduced fractions; nothing is compared in floating point.

pub mod cli;
pub mod error;
pub mod fuzzy;
pub mod par;
pub mod predicates;
pub mod search;
pub mod structure;
pub mod theorems;

pub use error::{Error, Result};
pub use fuzzy::{FuzzySubset, Grade};
pub use predicates::{AlphaBetaPair, Predicate, PredicateVerdict, Witness};
pub use structure::{CrispSubset, GammaSemigroup, Homomorphism};
pub use theorems::TheoremReport;
