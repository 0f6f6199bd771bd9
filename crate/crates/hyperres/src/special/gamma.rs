//! Complex log-Gamma by upward recurrence and Stirling's series.

use crate::error::{Error, Result};
use crate::scaled::Scaled;
use num_complex::Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2j} / (2j (2j-1)) for j = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series
}

/// Whether `z` is a pole of Gamma (a non-positive integer).
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `log Γ(z)`, continuous off the negative real axis and real for `z > 0`.
///
/// Poles of Gamma signal [`Error::GammaPole`].
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::GammaPole(z));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite argument {z}")));
    }
    const RMIN: f64 = 10.0;
    if z.re >= RMIN || (z.re >= 0.0 && z.im.abs() >= 15.0) {
        return Ok(stirling(z));
    }
    let shift = (RMIN - z.re).ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    for _ in 0..shift {
        acc += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - acc)
}

/// `Γ(z)` in scaled form.
pub fn gamma_scaled(z: Complex64) -> Result<Scaled> {
    Ok(Scaled::from_log(ln_gamma(z)?))
}

/// `1 / Γ(z)` in scaled form; exactly zero at the poles of Gamma.
pub fn rgamma_scaled(z: Complex64) -> Scaled {
    match ln_gamma(z) {
        Ok(l) => Scaled::from_log(-l),
        Err(_) => Scaled::ZERO,
    }
}

/// `log Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).map(|z| z.re).unwrap_or(f64::INFINITY)
}

/// `Γ(x)` for real `x` away from poles.
pub fn gamma_real(x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    match ln_gamma(z) {
        Ok(l) => {
            let v = l.re.exp();
            // Sign of Gamma on the negative axis alternates between poles.
            if x < 0.0 && (x.floor() as i64) % 2 != 0 {
                -v
            } else {
                v
            }
        }
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn special_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        // 10! = 3628800
        let l11 = ln_gamma(c(11.0, 0.0)).unwrap();
        assert!((l11.re - 3_628_800f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn recurrence_at_reference_point() {
        let z = c(2.5, 1.0);
        let lhs = Scaled::from_log(ln_gamma(z + 1.0).unwrap()).to_complex();
        let rhs = z * Scaled::from_log(ln_gamma(z).unwrap()).to_complex();
        assert!((lhs - rhs).norm() / rhs.norm() < 1e-12);
    }

    #[test]
    fn poles_are_reported() {
        for k in 0..5 {
            assert_eq!(
                ln_gamma(c(-(k as f64), 0.0)),
                Err(Error::GammaPole(c(-(k as f64), 0.0)))
            );
            assert!(rgamma_scaled(c(-(k as f64), 0.0)).is_zero());
        }
    }

    #[test]
    fn reflection_formula() {
        // Γ(z)Γ(1-z) = π / sin(πz)
        for &z in &[c(0.3, 0.7), c(-3.2, 2.0), c(-15.5, -4.0), c(0.1, -12.0)] {
            let lhs = Scaled::from_log(ln_gamma(z).unwrap() + ln_gamma(1.0 - z).unwrap());
            let rhs = std::f64::consts::PI / (z * std::f64::consts::PI).sin();
            assert!((lhs.to_complex() - rhs).norm() / rhs.norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn real_gamma_sign() {
        assert!((gamma_real(-0.5) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma_real(-1.5) - 4.0 / 3.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn recurrence_holds(re in -40.0f64..40.0, im in -40.0f64..40.0) {
            let z = c(re, im);
            prop_assume!((z - z.re.round()).norm() > 1e-3 || z.re > 0.5);
            let lhs = Scaled::from_log(ln_gamma(z + 1.0).unwrap());
            let rhs = Scaled::from_log(ln_gamma(z).unwrap()) * z;
            let rel = (lhs / rhs).to_complex() - 1.0;
            prop_assert!(rel.norm() < 1e-11);
        }

        #[test]
        fn conjugation_symmetry(re in 0.01f64..30.0, im in -30.0f64..30.0) {
            let z = c(re, im);
            let a = ln_gamma(z).unwrap();
            let b = ln_gamma(z.conj()).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
        }
    }
}
