//! Radial coefficient equation in Legendre normalisation,
//! `w'' + coth r w' - [ν(ν+1) + k²/sinh² r + V(r)] w = 0`,
//! integrated in `τ = ln r` with `y = (w, r w_r)` by a fourth-order Magnus
//! method with step-doubling error control.

use crate::error::{Error, Result};
use crate::potential::Potential;
use num_complex::Complex64;

type Mat = [[Complex64; 2]; 2];

/// A solution at radius `r`: `w = v·e^scale`, `∂_r w = d·e^scale`.
#[derive(Clone, Copy, Debug)]
pub struct OdeState {
    pub r: f64,
    pub v: Complex64,
    pub d: Complex64,
    pub scale: f64,
    pub steps: usize,
}

/// The coefficient equation for one `(k, ν)` and potential.
pub struct RadialOde<'a> {
    pub k: f64,
    pub lambda: Complex64,
    pub pot: &'a Potential,
    pub rel_tol: f64,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut m = [[zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// `exp(Ω)` for a 2×2 complex matrix via `Ω = mI + B`, `B² = δ² I`.
fn mat_exp(o: &Mat) -> (Mat, f64) {
    let m = (o[0][0] + o[1][1]) * 0.5;
    let a = o[0][0] - m;
    let d2 = a * a + o[0][1] * o[1][0];
    let d = d2.sqrt();
    let (ch, shc, dd) = if d.norm() < 1e-4 {
        (1.0 + d2 * 0.5 + d2 * d2 / 24.0, 1.0 + d2 / 6.0 + d2 * d2 / 120.0, zero())
    } else {
        // Factor e^{δ} (Re δ ≥ 0) out of cosh and sinh to avoid overflow.
        let dd = if d.re >= 0.0 { d } else { -d };
        let em = (-2.0 * dd).exp();
        ((1.0 + em) * 0.5, (1.0 - em) * 0.5 / dd, dd)
    };
    let growth = dd.re;
    let e = Complex64::new(0.0, m.im + dd.im).exp();
    let out = [
        [(ch + shc * a) * e, shc * o[0][1] * e],
        [shc * o[1][0] * e, (ch - shc * a) * e],
    ];
    (out, m.re + growth)
}

impl<'a> RadialOde<'a> {
    pub fn new(pot: &'a Potential, k: f64, nu: Complex64) -> Self {
        RadialOde {
            k,
            lambda: nu * (nu + 1.0),
            pot,
            rel_tol: 1e-10,
        }
    }

    fn matrix(&self, tau: f64) -> Mat {
        let r = tau.exp();
        let sh = r.sinh();
        let q = self.lambda + self.k * self.k / (sh * sh) + self.pot.value(r);
        let one = Complex64::new(1.0, 0.0);
        [[zero(), one], [q * (r * r), Complex64::new(1.0 - r / r.tanh(), 0.0)]]
    }

    /// One Magnus step of length `h` in `τ`; returns the propagator and its
    /// log scale.
    fn propagator(&self, tau: f64, h: f64) -> (Mat, f64) {
        let c = 3f64.sqrt() / 6.0;
        let a1 = self.matrix(tau + h * (0.5 - c));
        let a2 = self.matrix(tau + h * (0.5 + c));
        let comm = {
            let x = mat_mul(&a2, &a1);
            let y = mat_mul(&a1, &a2);
            [[x[0][0] - y[0][0], x[0][1] - y[0][1]], [x[1][0] - y[1][0], x[1][1] - y[1][1]]]
        };
        let f = 3f64.sqrt() * h * h / 12.0;
        let mut o = [[zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                o[i][j] = (a1[i][j] + a2[i][j]) * (0.5 * h) + comm[i][j] * f;
            }
        }
        mat_exp(&o)
    }

    fn apply(p: &(Mat, f64), y: [Complex64; 2]) -> ([Complex64; 2], f64) {
        let m = &p.0;
        (
            [m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]],
            p.1,
        )
    }

    /// Integrate from `start` to radius `r1` (either direction).
    pub fn integrate(&self, start: OdeState, r1: f64) -> Result<OdeState> {
        if !(start.r > 0.0 && r1 > 0.0) {
            return Err(Error::InvalidInput("radial ODE needs positive radii".into()));
        }
        let (t0, t1) = (start.r.ln(), r1.ln());
        let dir = if t1 >= t0 { 1.0 } else { -1.0 };
        let mut tau = t0;
        let mut y = [start.v, start.d * start.r];
        let mut scale = start.scale;
        let scale_y = |y: &mut [Complex64; 2], scale: &mut f64| {
            let n = y[0].norm().max(y[1].norm());
            if n > 0.0 && n.is_finite() {
                y[0] /= n;
                y[1] /= n;
                *scale += n.ln();
            }
        };
        scale_y(&mut y, &mut scale);
        // Initial step from the local rate of change.
        let rate = {
            let a = self.matrix(t0);
            (a[1][0].norm() + a[1][1].norm() + 1.0).sqrt()
        };
        let mut h = (0.2 / rate).min((t1 - t0).abs());
        let mut steps = 0usize;
        while dir * (t1 - tau) > 1e-15 * (1.0 + tau.abs()) {
            if h < 1e-12 {
                return Err(Error::MatchingFailure {
                    r_min: tau.exp(),
                    condition: f64::INFINITY,
                });
            }
            let hs = h.min(dir * (t1 - tau)) * dir;
            let full = self.propagator(tau, hs);
            let half1 = self.propagator(tau, 0.5 * hs);
            let half2 = self.propagator(tau + 0.5 * hs, 0.5 * hs);
            let (yb, eb) = Self::apply(&full, y);
            let (ym, em) = Self::apply(&half1, y);
            let (ys, es) = Self::apply(&half2, ym);
            let es = em + es;
            // Compare on a common scale.
            let f = (eb - es).exp();
            let num = (yb[0] * f - ys[0]).norm().max((yb[1] * f - ys[1]).norm());
            let den = ys[0].norm().max(ys[1].norm()).max(1e-300);
            let err = num / den / 15.0;
            steps += 1;
            if !err.is_finite() || err > self.rel_tol {
                let fac = if err.is_finite() { 0.9 * (self.rel_tol / err).powf(0.2) } else { 0.25 };
                h = hs.abs() * fac.clamp(0.1, 0.9);
                continue;
            }
            // Richardson-improved value of the accepted step.
            y = [ys[0] + (ys[0] - yb[0] * f) / 15.0, ys[1] + (ys[1] - yb[1] * f) / 15.0];
            scale += es;
            scale_y(&mut y, &mut scale);
            tau += hs;
            let fac = if err > 0.0 { 0.9 * (self.rel_tol / err).powf(0.2) } else { 4.0 };
            h = hs.abs() * fac.clamp(0.2, 4.0);
            if steps > 200_000 {
                return Err(Error::MatchingFailure {
                    r_min: tau.exp(),
                    condition: f64::INFINITY,
                });
            }
        }
        Ok(OdeState {
            r: r1,
            v: y[0],
            d: y[1] / r1,
            scale,
            steps,
        })
    }
}
