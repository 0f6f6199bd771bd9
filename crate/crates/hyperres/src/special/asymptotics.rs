//! Leading-order uniform asymptotics of the Legendre functions.
//!
//! These carry `O(1/k)` (Airy regime) or `O(1/|ν|)` (Bessel regime) relative
//! errors, so they serve as validation envelopes for the production
//! evaluators in [`super::legendre`] rather than as evaluation strategies.

use super::airy::airy_ai;
use super::bessel::bessel_modified_scaled;
use super::gamma::{ln_gamma, ln_gamma_real};
use crate::error::Result;
use crate::phase::{p_alpha, phase, q_alpha};
use crate::scaled::Scaled;
use num_complex::Complex64;
use std::f64::consts::PI;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Airy-regime approximation of `P^{-k}_{-1/2+kα}(cosh r)`, `arg α ∈ [0, π/2]`.
pub fn p_airy(k: f64, alpha: Complex64, r: f64) -> Result<Scaled> {
    let ph = phase(alpha, r)?;
    let sh = r.sinh();
    let w = Complex64::from_polar(k.powf(2.0 / 3.0), 2.0 * PI / 3.0) * ph.zeta;
    let pref = Complex64::new(2.0 * PI.sqrt() * k.powf(1.0 / 6.0), 0.0) * ph.zeta.powf(0.25)
        * (i() * PI / 6.0).exp()
        / (1.0 + alpha * alpha * sh * sh).powf(0.25);
    let lg = Complex64::new(-ln_gamma_real(k + 1.0), 0.0) - k * ph.p;
    Ok(Scaled::from_log(lg) * pref * airy_ai(w))
}

/// Airy-regime approximation of `**Q**^k_{-1/2+kα}(cosh r)`.
pub fn q_airy(k: f64, alpha: Complex64, r: f64) -> Result<Scaled> {
    let ph = phase(alpha, r)?;
    let sh = r.sinh();
    let w = k.powf(2.0 / 3.0) * ph.zeta;
    let pref = Complex64::new(2.0 * PI * k.powf(1.0 / 6.0), 0.0) * ph.zeta.powf(0.25) * (alpha * 0.5).sqrt()
        / (1.0 + alpha * alpha * sh * sh).powf(0.25);
    let lg = -ln_gamma(k * alpha + 1.0)? + k * ph.q;
    Ok(Scaled::from_log(lg) * pref * airy_ai(w))
}

/// Bessel-regime approximation `ν^{-k} (r/sinh r)^{1/2} I_k((ν+1/2) r)`.
pub fn p_bessel(k: f64, nu: Complex64, r: f64) -> Result<Scaled> {
    let z = (nu + 0.5) * r;
    let (is, _) = bessel_modified_scaled(k, z)?;
    // The scaled I carries the factor e^{-|Re z| - i Im z}.
    let lg = -k * nu.ln() + Complex64::new(0.5 * (r / r.sinh()).ln() + z.re.abs(), z.im);
    Ok(Scaled::from_log(lg) * is)
}

/// Bessel-regime approximation `ν^k/Γ(k+ν+1) (r/sinh r)^{1/2} K_k((ν+1/2) r)`.
pub fn q_bessel(k: f64, nu: Complex64, r: f64) -> Result<Scaled> {
    let z = (nu + 0.5) * r;
    let (_, ks) = bessel_modified_scaled(k, z)?;
    let lg = k * nu.ln() - ln_gamma(nu + k + 1.0)? + 0.5 * (r / r.sinh()).ln() - z;
    Ok(Scaled::from_log(lg) * ks)
}

/// `log` of the upper envelope `e^{k Re(φ - p)}/Γ(k+1)` for `|P^{-k}_{-1/2+kα}|`.
pub fn p_envelope_log(k: f64, alpha: Complex64, r: f64) -> Result<f64> {
    let ph = phase(alpha, r)?;
    Ok(k * (ph.phi - p_alpha(alpha)).re - ln_gamma_real(k + 1.0))
}

/// `log` of the upper envelope `|α|^{1/2} e^{-k Re(φ - q)}/|Γ(kα+1)|` for `|**Q**^k_{-1/2+kα}|`.
pub fn q_envelope_log(k: f64, alpha: Complex64, r: f64) -> Result<f64> {
    let ph = phase(alpha, r)?;
    Ok(0.5 * alpha.norm().ln() - k * (ph.phi - q_alpha(alpha)).re - ln_gamma(k * alpha + 1.0)?.re)
}
