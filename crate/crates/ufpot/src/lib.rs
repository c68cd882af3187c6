//! Union-find (disjoint sets) with union-by-size/rank and path compression,
//! together with the machinery to check, at run time, the invariants and
//! amortized-accounting inequalities that make the structure fast: per-step
//! size/rank lemmas, potential functions over subtree sizes, and the
//! Ackermann-function hierarchy with its inverse.
//!
//! The crate is organized around a small set of layers:
//!
//! * [`dsu`] — the forest itself, with an observer hook for pointer rewrites.
//! * [`shadow`] — a brute-force descendant-set oracle for small `n`.
//! * [`instrument`] — running max-sizes and online lemma checks.
//! * [`ackfn`] — Ackermann functions, inverse levels, iterated logarithms.
//! * [`potential`] — the potential functions and per-find accounting.
//! * [`workload`] — deterministic trace generation and the trace text format.
//! * [`runner`] — drives a trace through all of the above into a report.
//! * [`report`] — JSON/CSV serialization of run results.

pub mod ackfn;
pub mod dsu;
pub mod instrument;
pub mod potential;
pub mod report;
pub mod rng;
pub mod runner;
pub mod shadow;
pub mod workload;

pub use dsu::{Compression, DsuState, LinkRule, NodeId, Variant};
pub use potential::PotentialKind;
pub use runner::{run_trace, RunConfig};
pub use workload::Trace;
