//! High-precision verification of approximate functional equations for
//! Dirichlet series.

pub mod afe;
pub mod bernoulli;
pub mod characters;
pub mod coeffs;
pub mod cyclo;
pub mod error;
pub mod harness;
pub mod hp;
pub mod identities;
pub mod sieve;
pub mod special;
pub mod zeta;

pub use error::{Error, Result};
