//! Borel orbits on the nilradical of `sl(n+1)` for `n <= 4`.
//!
//! The crate bundles a catalog of orbit strata with their defining
//! equations, a classifier, brute-force orbit oracles over finite fields,
//! the closure order between strata and a checker for conjugating words.

pub mod arith;
pub mod catalog;
pub mod classify;
pub mod error;
pub mod lie;
pub mod oracle;
pub mod order;
pub mod witness;

pub use error::{Error, Result};
