//! Exact symbolic calculus for Poisson-Nijenhuis structures on coordinate charts.
//!
//! Everything is computed over the field of multivariate rational functions
//! with arbitrary-precision rational coefficients, so every identity check in
//! this crate is an exact zero test, never a numerical tolerance.
//!
//! The crate is organized bottom-up:
//!
//! * [`chart`] — named coordinate charts, the common context of all values;
//! * [`expr`] — canonical rational-function arithmetic and the expression parser;
//! * [`tensor`] — sparse antisymmetric multivectors and forms, (1,1)-tensor fields;
//! * [`calculus`] — exterior/Cartan calculus, Schouten and deformed brackets,
//!   Koszul bracket, Nijenhuis torsion, graded operators;
//! * [`pn`] — admissibility and compatibility of a pair (P, N), the concomitant
//!   by two independent routes, and the trace/contraction/operator identities;
//! * [`modular`] — modular vector fields of the hierarchy N^k P, the fundamental
//!   functions in involution, and the representative-level class relations;
//! * [`fixtures`] — curated example structures and seeded random generators;
//! * [`structure`], [`report`], [`suite`] — file ingestion, check reports and
//!   the batch orchestration used by the `pncheck` binary.
//!
//! Sign and index conventions are fixed once, in `docs/conventions.md` at the
//! repository root, and every formula in this crate is written against them.

pub mod calculus;
pub mod chart;
pub mod expr;
pub mod fixtures;
pub mod modular;
pub mod pn;
pub mod report;
pub mod rng;
pub mod structure;
pub mod suite;
pub mod tensor;

pub use chart::Chart;
pub use expr::{parse_expr, RatFunc, Rational};

