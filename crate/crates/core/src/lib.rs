//! Folded Reed-Solomon codes over prime fields and the constructive machinery
//! behind their proximity gaps: subspace-design checks, pinning-set sampling,
//! list decoding with pruning, line stitching and peeling, correlated-agreement
//! extraction, and the line-to-affine lifting experiments.
//!
//! Everything is exact: field elements are canonical residues, distances are
//! rationals, and every linear-algebra step is an echelon computation over F_q.
//! The [`harness`] module drives seeded Monte Carlo experiments on top of the
//! library and emits JSON-lines reports.

pub mod decoder;
pub mod design;
pub mod error;
pub mod field;
pub mod frs;
pub mod harness;
pub mod linalg;
pub mod pinning;
pub mod poly;
pub mod rational;
pub mod stitching;

mod arith;

pub use error::{Error, Result};
pub use field::{FieldContext, FieldElement, PrimeField};
pub use frs::{block_distance, CodeParams, Symbol, Word};
pub use linalg::{AffineSubspace, LinearSubspace};
pub use poly::Poly;
pub use rational::Rational;

/// Default cap on brute-force enumeration sizes (messages, affine points, ...).
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;
