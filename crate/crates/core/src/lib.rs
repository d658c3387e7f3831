//! Solvers for the maximum expected value all-or-nothing subset problem:
//! pick a subset `S` of items maximizing
//! `(sum of profits over S) * (product of success probabilities over S)`.
//!
//! The crate provides
//!
//! - [`exact`]: an exhaustive-enumeration oracle and a profit-indexed
//!   dynamic program with reconstruction,
//! - [`fptas`]: a profit-scaling approximation scheme with a `(1 - eps)`
//!   guarantee,
//! - [`reduction`]: a runnable mapping of subset-sum questions onto this
//!   problem, with a certified decision procedure,
//! - [`format`] and [`gen`]: the instance file format and seeded sampling.

pub mod error;
pub mod exact;
pub mod format;
pub mod fptas;
pub mod gen;
pub mod instance;
pub mod reduction;

mod certexp;

pub use error::{Error, Result};
pub use instance::{Instance, Item, NormalizationReport, Solution};
