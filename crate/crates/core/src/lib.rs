//! Generalized linearized Reed-Solomon (GLRS) codes in the sum-rank metric.
//!
//! The crate builds the full pipeline around these codes:
//!
//! * exact arithmetic in a tower F_p ⊂ F_q ⊂ F_{q^m} with q = p^s ([`field`]),
//! * skew-polynomial operator evaluation and generalized Moore matrices
//!   ([`skew`], [`linalg`]),
//! * the sum-rank metric and GLRS code construction ([`sum_rank`], [`codes`]),
//! * (semi)linear sum-rank isometries used to disguise a code and the exact
//!   transport of its defining parameters ([`isometry`]),
//! * structural distinguishers (square code, derivation-operator stack,
//!   intersection chain) with random-code baselines ([`distinguishers`]),
//! * parameter recovery from a disguised generator matrix, verified by row
//!   space equality ([`recovery`]),
//! * reproducible Monte Carlo experiment campaigns ([`experiment`]) and JSON
//!   wire formats ([`wire`]) shared with the `sumrank` CLI.
//!
//! Everything is deterministic for a fixed RNG seed and exact over the field;
//! there is no floating point anywhere in the pipeline.

pub mod codes;
pub mod distinguishers;
pub mod error;
pub mod experiment;
pub mod field;
pub mod isometry;
pub mod linalg;
pub mod recovery;
pub mod skew;
pub mod sum_rank;
pub mod wire;

pub use error::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
