//! Reductions of distributions of a finite alphabet.
//!
//! A distribution covers an alphabet by pairwise incomparable sub-alphabets.
//! A reduction of a distribution `Δ` is a set of at least two strictly
//! smaller merged distributions such that a language is decomposable with
//! respect to `Δ` exactly when it is decomposable with respect to every
//! member. This crate decides, refutes and generates reductions.

pub mod candidate;
pub mod counterexample;
pub mod distribution;
pub mod error;
pub mod generator;
pub mod io;
pub mod language;
pub mod merge;
pub mod sample;
pub mod structural;
pub mod substitution;
pub mod symbols;
pub mod verifier;

pub use candidate::{CandidateReduction, Dimension};
pub use distribution::{Distribution, Relation};
pub use error::{Error, Result};
pub use merge::IndexPartition;
pub use symbols::{Alphabet, SymSet, Symbol};
pub use verifier::{Outcome, Verdict};
