//! Koszul cohomology of Veronese embeddings.
//!
//! The crate computes dimensions of the groups `K_{p,q}(P^n; O(b), O(d))` by
//! building the twisted Koszul complex of `P^n` in the monomial basis, splitting
//! each differential into torus-weight (multidegree) blocks, and eliminating
//! those blocks exactly over a word-size prime field. Around that engine sit
//! the closed-form vanishing ranges for Veronese syzygies, a cycle-level
//! implementation of the evaluation and projection maps on linear syzygies,
//! and a verification harness that compares computed tables with every
//! predicted range.
//!
//! Module map:
//!
//! - [`bounds`]: big-integer binomials and every closed-form range.
//! - [`polyspace`]: monomial bases, multidegrees, restriction to `x_0 = 0`.
//! - [`wedge`]: exterior-power indexing, contractions and the s-fold contraction.
//! - [`koszul`]: multigraded blocks of the Koszul differential.
//! - [`linalg`]: prime fields, sparse rank, fraction-free rational rank.
//! - [`betti`]: the rank engine, Betti tables, duality and vanishing checks.
//! - [`maps`]: cycles, homology coordinates, evaluation and projection maps.
//! - [`cache`]: append-only block-rank cache.
//! - [`harness`]: verification reports and the self-test suite.

pub mod betti;
pub mod bounds;
pub mod cache;
pub mod harness;
pub mod koszul;
pub mod linalg;
pub mod maps;
pub mod polyspace;
pub mod wedge;

mod error;

pub use betti::{BettiTable, Engine, EngineConfig, EntryStatus};
pub use bounds::{RangePrediction, Source, VeroneseParams};
pub use error::{Error, Result};
pub use linalg::{FieldSpec, PrimeField, PINNED_PRIMES};
