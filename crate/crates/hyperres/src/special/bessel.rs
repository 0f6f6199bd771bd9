//! Modified Bessel functions `I_ν`, `K_ν` of real order and complex argument,
//! backed by the `complex-bessel` port of Amos' algorithm.

use crate::error::{Error, Result};
use num_complex::Complex64;

fn map_err(z: Complex64) -> impl Fn(complex_bessel::Error) -> Error {
    move |e| match e {
        complex_bessel::Error::InvalidInput => Error::SingularArgument(z),
        _ => Error::PrecisionExhausted(1.0),
    }
}

/// `(I_ν(z), K_ν(z))` for `ν ≥ 0` and `z ≠ 0`.
pub fn bessel_modified(order: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if z.norm() == 0.0 {
        return Err(Error::SingularArgument(z));
    }
    if order < 0.0 {
        return Err(Error::InvalidInput(format!("negative order {order}")));
    }
    let i = complex_bessel::besseli(order, z).map_err(map_err(z))?;
    let k = complex_bessel::besselk(order, z).map_err(map_err(z))?;
    Ok((i, k))
}

/// `(I_ν, I_ν', K_ν, K_ν')` using `I' = I_{ν+1} + (ν/z) I_ν`, `K' = -K_{ν+1} + (ν/z) K_ν`.
pub fn bessel_modified_deriv(order: f64, z: Complex64) -> Result<[Complex64; 4]> {
    let (i0, k0) = bessel_modified(order, z)?;
    let (i1, k1) = bessel_modified(order + 1.0, z)?;
    let r = order / z;
    Ok([i0, i1 + r * i0, k0, -k1 + r * k0])
}

/// Exponentially scaled `(e^{-z} I_ν(z), e^{z} K_ν(z))` for large arguments.
pub fn bessel_modified_scaled(order: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if z.norm() == 0.0 {
        return Err(Error::SingularArgument(z));
    }
    let i = complex_bessel::besseli_scaled(order, z).map_err(map_err(z))?;
    let k = complex_bessel::besselk_scaled(order, z).map_err(map_err(z))?;
    // Amos scales I by exp(-|Re z|) and K by exp(z).
    let i = i * Complex64::new(0.0, -z.im).exp();
    Ok((i, k))
}
