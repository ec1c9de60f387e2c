//! Universal lossless codes for the two-terminal complementary delivery
//! system: one encoder sees a pair of correlated sequences and broadcasts a
//! single codeword; each of two decoders holds one of the sequences and
//! recovers the other.
//!
//! * [`types`]: sequences, joint types, class sizes and ranking.
//! * [`info`]: entropies, divergences, exponent scans and finite-n bounds.
//! * [`table`]: per-joint-type coding tables built by bipartite edge
//!   coloring.
//! * [`ff`]: the fixed-length code and its exact error probability.
//! * [`fv`]: the variable-length code, overflow/underflow probabilities and
//!   the fixed-length wrapping construction.
//! * [`sim`]: seeded Monte-Carlo checks against the exact values.
//! * [`cli`]: the `cdcode` command-line front end.

pub mod cli;
pub mod error;
pub mod ff;
pub mod fv;
pub mod info;
pub mod sim;
pub mod table;
pub mod types;

pub use error::{Error, Result};
