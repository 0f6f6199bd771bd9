//! Special functions: log-Gamma, Airy, modified Bessel and associated
//! Legendre functions of complex degree on the cut `(1, ∞)`.

pub mod airy;
pub mod asymptotics;
pub mod bessel;
pub mod gamma;
pub mod legendre;
pub mod taylor;

pub use airy::airy_ai;
pub use bessel::bessel_modified;
pub use gamma::{ln_gamma, rgamma_scaled};
pub use legendre::{legendre_pair, LegendrePair};
