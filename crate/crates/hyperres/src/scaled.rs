//! Complex numbers carried as `m · exp(e)` with `|m| = 1`, so that products of
//! Gamma functions and Legendre functions at large parameters never overflow.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    m: Complex64,
    e: f64,
}

impl Default for Scaled {
    fn default() -> Self {
        Scaled::ZERO
    }
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        m: Complex64 { re: 0.0, im: 0.0 },
        e: f64::NEG_INFINITY,
    };
    pub const ONE: Scaled = Scaled {
        m: Complex64 { re: 1.0, im: 0.0 },
        e: 0.0,
    };

    pub fn new(z: Complex64) -> Scaled {
        Scaled::from_parts(z, 0.0)
    }

    pub fn real(x: f64) -> Scaled {
        Scaled::new(Complex64::new(x, 0.0))
    }

    /// `m · exp(e)` for arbitrary `m`.
    pub fn from_parts(m: Complex64, e: f64) -> Scaled {
        let a = m.norm();
        if a == 0.0 {
            return Scaled::ZERO;
        }
        if a.is_nan() {
            return Scaled { m, e };
        }
        if a.is_infinite() {
            // Overflowed mantissa: rescale componentwise.
            let s = m.re.abs().max(m.im.abs());
            let mm = m / s;
            return Scaled::from_parts(mm, e + s.ln());
        }
        Scaled { m: m / a, e: e + a.ln() }
    }

    /// `exp(l)` for a complex logarithm `l`.
    pub fn from_log(l: Complex64) -> Scaled {
        if l.re == f64::NEG_INFINITY {
            return Scaled::ZERO;
        }
        Scaled {
            m: Complex64::from_polar(1.0, l.im),
            e: l.re,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.m.re.is_finite() && self.m.im.is_finite() && (self.e.is_finite() || self.is_zero())
    }

    /// Unit-modulus phase factor (zero for the zero value).
    pub fn unit(&self) -> Complex64 {
        self.m
    }

    /// `log |z|` (`-inf` for zero).
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.e
        }
    }

    pub fn arg(&self) -> f64 {
        self.m.arg()
    }

    /// `log |z| + i arg z`.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs(), self.arg())
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.m * self.e.exp()
        }
    }

    pub fn norm(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.e.exp()
        }
    }

    pub fn conj(&self) -> Scaled {
        Scaled { m: self.m.conj(), e: self.e }
    }

    pub fn recip(&self) -> Scaled {
        Scaled { m: self.m.conj(), e: -self.e }
    }

    pub fn powf(&self, p: f64) -> Scaled {
        Scaled::from_log(self.ln() * p)
    }

    /// Multiply by `exp(l)`.
    pub fn mul_exp(&self, l: Complex64) -> Scaled {
        if self.is_zero() {
            return *self;
        }
        Scaled {
            m: self.m * Complex64::from_polar(1.0, l.im),
            e: self.e + l.re,
        }
    }

    /// Ratio `self / other` as an ordinary complex number.
    pub fn ratio(&self, other: &Scaled) -> Complex64 {
        (*self / *other).to_complex()
    }
}

impl From<Complex64> for Scaled {
    fn from(z: Complex64) -> Self {
        Scaled::new(z)
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::real(x)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, o: Scaled) -> Scaled {
        if self.is_zero() || o.is_zero() {
            return Scaled::ZERO;
        }
        let m = self.m * o.m;
        // Renormalise lazily: |m| drifts from 1 only by rounding.
        Scaled { m: m / m.norm(), e: self.e + o.e }
    }
}

impl Mul<Complex64> for Scaled {
    type Output = Scaled;
    fn mul(self, o: Complex64) -> Scaled {
        if self.is_zero() {
            return self;
        }
        Scaled::from_parts(self.m * o, self.e)
    }
}

impl Mul<f64> for Scaled {
    type Output = Scaled;
    fn mul(self, o: f64) -> Scaled {
        self * Complex64::new(o, 0.0)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, o: Scaled) -> Scaled {
        if self.is_zero() {
            return Scaled::ZERO;
        }
        if o.is_zero() {
            return Scaled {
                m: Complex64::new(f64::NAN, f64::NAN),
                e: f64::INFINITY,
            };
        }
        let m = self.m * o.m.conj();
        Scaled { m: m / m.norm(), e: self.e - o.e }
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, o: Scaled) -> Scaled {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let e = self.e.max(o.e);
        let m = self.m * (self.e - e).exp() + o.m * (o.e - e).exp();
        Scaled::from_parts(m, e)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { m: -self.m, e: self.e }
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, o: Scaled) -> Scaled {
        self + (-o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_plain_complex() {
        let a = Complex64::new(1.5, -2.0);
        let b = Complex64::new(-0.25, 3.0);
        let (sa, sb) = (Scaled::new(a), Scaled::new(b));
        assert!(((sa * sb).to_complex() - a * b).norm() < 1e-14);
        assert!(((sa / sb).to_complex() - a / b).norm() < 1e-14);
        assert!(((sa + sb).to_complex() - (a + b)).norm() < 1e-14);
        assert!(((sa - sb).to_complex() - (a - b)).norm() < 1e-14);
    }

    #[test]
    fn huge_magnitudes_survive() {
        let big = Scaled::from_log(Complex64::new(5000.0, 0.3));
        let small = Scaled::from_log(Complex64::new(-5000.0, -0.3));
        let p = big * small;
        assert!((p.to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let s = big + big;
        assert!((s.ln_abs() - 5000.0 - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_is_absorbing() {
        let z = Scaled::ZERO;
        assert!((z * Scaled::real(3.0)).is_zero());
        assert!(((z + Scaled::real(3.0)).to_complex() - 3.0).norm() < 1e-15);
        assert_eq!(z.ln_abs(), f64::NEG_INFINITY);
    }
}
