//! Abstract branch-and-bound tree models.
//!
//! A branching variable is a pair of integer gains `(l, r)` with
//! `1 <= l <= r`: branching splits a node into two children whose remaining
//! dual gap shrinks by `l` and `r` respectively, and a node whose gap has
//! reached zero is a leaf. On top of that model this crate provides:
//!
//! - exact minimal tree sizes for single-variable, multi-variable and
//!   multiplicity-capped branching ([`trees`], [`gvb`]),
//! - the asymptotic growth ratio of a variable, the root `x >= 1` of
//!   `x^r - x^(r-l) - 1`, with a radical-solvability classifier ([`ratio`]),
//! - the dominance partial order between variables, its DAG and transitive
//!   reduction ([`dag`]),
//! - the product / ratio / tree-size selection rules ([`scoring`]) and a
//!   rule-driven tree simulator over dominance-free frontier states with a
//!   seeded instance generator and experiment harness ([`sim`]).
//!
//! The crate is `no_std` (with `alloc`); all I/O lives in the companion CLI
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dag;
pub mod gvb;
pub mod model;
pub mod ratio;
pub mod scoring;
pub mod sim;
pub mod trees;

pub use dag::{build_dominance_dag, DominanceDag};
pub use model::{validate_instance, Gap, Instance, Multiplicities, TreeSize, Variable};
pub use ratio::{classify_solvability, compute_phi, PhiCache, PhiResult};
pub use scoring::{RuleKind, ScoringParams, SelectionRule};
