//! Resonances of Schrödinger operators `Δ + V` on hyperbolic space `H^{n+1}`
//! for compactly supported radial potentials.
//!
//! The crate is organised bottom-up: [`special`] evaluates Gamma, Airy,
//! modified Bessel and associated Legendre functions; [`phase`] computes the
//! Liouville phase, the growth exponent `H` and the indicator function;
//! [`mode`] builds the per-mode connection coefficients and scattering
//! matrix elements; [`resonance`] locates their zeros; [`counting`] turns
//! resonance sets into counting functions and Weyl-law comparisons;
//! [`laplace`] is a standalone Laplace-method oracle.

pub mod counting;
pub mod error;
pub mod laplace;
pub mod mode;
pub mod ode;
pub mod phase;
pub mod potential;
pub mod quad;
pub mod resonance;
pub mod roots;
pub mod scaled;
pub mod selftest;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use potential::{Potential, Profile};
pub use scaled::Scaled;

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
