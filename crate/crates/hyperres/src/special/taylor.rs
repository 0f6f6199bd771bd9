//! Taylor-series continuation of solutions of the associated Legendre
//! equation along the cut `z ∈ (1, ∞)`.
//!
//! Positions are carried as `x = z - 1 = 2 sinh²(r/2)` so that points close
//! to `z = 1` keep full relative precision. Multiplying the equation by
//! `(1 - z²)` gives polynomial coefficients and a five-term recurrence for
//! the Taylor coefficients about any base point.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// `(1 - z²) w'' - 2 z w' + [λ - μ² / (1 - z²)] w = 0`, `λ = ν(ν+1)`.
#[derive(Clone, Copy, Debug)]
pub struct LegendreOde {
    pub lambda: Complex64,
    pub mu2: f64,
}

/// A solution at `z = 1 + x`: value `w · e^scale`, `dw/dz = dw · e^scale`.
#[derive(Clone, Copy, Debug)]
pub struct ZState {
    pub x: f64,
    pub w: Complex64,
    pub dw: Complex64,
    pub scale: f64,
    /// Accumulated relative error estimate.
    pub err: f64,
}

const EPS: f64 = 1.1e-16;
const MAX_TERMS: usize = 600;

impl ZState {
    fn normalise(&mut self) {
        let n = self.w.norm().max(self.dw.norm() * self.x.min(1.0));
        if n > 0.0 && n.is_finite() {
            self.w /= n;
            self.dw /= n;
            self.scale += n.ln();
        }
    }
}

impl LegendreOde {
    pub fn new(nu: Complex64, mu: f64) -> Self {
        LegendreOde {
            lambda: nu * (nu + 1.0),
            mu2: mu * mu,
        }
    }

    /// Largest admissible step from `x` (distance `x` to the singular point
    /// `z = 1`, and a bound on the local oscillation or growth per step).
    fn max_step(&self, x: f64) -> f64 {
        let zz = x * (x + 2.0);
        let kappa = (self.lambda.norm() / zz + self.mu2 / (zz * zz)).sqrt();
        (0.5 * x).min(2.5 / kappa.max(1e-300))
    }

    fn step(&self, st: &ZState, h: f64, buf: &mut Vec<Complex64>) -> Result<ZState> {
        let x0 = st.x;
        let z0 = 1.0 + x0;
        let c0 = -x0 * (2.0 + x0);
        let c1 = -2.0 * z0;
        let c2 = -1.0;
        let d = [c0 * c0, 2.0 * c0 * c1, c1 * c1 + 2.0 * c0 * c2, 2.0 * c1 * c2, c2 * c2];
        let e = [
            -2.0 * z0 * c0,
            -2.0 * (z0 * c1 + c0),
            -2.0 * (z0 * c2 + c1),
            -2.0 * c2,
        ];
        let lam = self.lambda;
        let f = [lam * c0 - self.mu2, lam * c1, lam * c2];
        let mut hp = [1.0; 7];
        for i in 1..7 {
            hp[i] = hp[i - 1] * h;
        }
        let dd: [f64; 5] = std::array::from_fn(|i| d[i] * hp[i]);
        let ee: [f64; 4] = std::array::from_fn(|i| e[i] * hp[i + 1]);
        let ff: [Complex64; 3] = std::array::from_fn(|i| f[i] * hp[i + 2]);

        buf.clear();
        buf.push(st.w);
        buf.push(st.dw * h);
        let mut s = buf[0] + buf[1];
        let mut sd = buf[1];
        let mut abs_sum = buf[0].norm() + buf[1].norm();
        let zero = Complex64::new(0.0, 0.0);
        let get = |b: &Vec<Complex64>, i: isize| if i < 0 { zero } else { b[i as usize] };
        let mut m = 0usize;
        loop {
            let mi = m as isize;
            let mut acc = zero;
            for i in 1..5 {
                let j = mi - i as isize + 2;
                if j >= 2 {
                    acc += get(buf, j) * (dd[i] * (j as f64) * ((j - 1) as f64));
                }
            }
            for i in 0..4 {
                let j = mi - i as isize + 1;
                if j >= 1 {
                    acc += get(buf, j) * (ee[i] * j as f64);
                }
            }
            for i in 0..3 {
                let j = mi - i as isize;
                if j >= 0 {
                    acc += get(buf, j) * ff[i];
                }
            }
            let next = -acc / (dd[0] * ((m + 2) * (m + 1)) as f64);
            buf.push(next);
            s += next;
            sd += next * ((m + 2) as f64);
            abs_sum += next.norm() * (m + 3) as f64;
            m += 1;
            let n = buf.len();
            let tail = buf[n - 1].norm() + buf[n - 2].norm() + buf[n - 3].norm();
            if m > 4 && tail * (n as f64) < EPS * 0.1 * (s.norm() + sd.norm()) {
                break;
            }
            if n > MAX_TERMS {
                return Err(Error::PrecisionExhausted(1.0));
            }
        }
        let cond = abs_sum / (s.norm() + sd.norm()).max(1e-300);
        let mut out = ZState {
            x: x0 + h,
            w: s,
            dw: sd / h,
            scale: st.scale,
            err: st.err + EPS * cond,
        };
        out.normalise();
        Ok(out)
    }

    /// Continue a solution from `st.x` to `x1`.
    pub fn walk(&self, st: ZState, x1: f64) -> Result<ZState> {
        let mut cur = st;
        let mut buf = Vec::with_capacity(128);
        let tol = 1e-15 * x1.abs().max(1e-300);
        while (x1 - cur.x).abs() > tol {
            let hmax = self.max_step(cur.x);
            let rem = x1 - cur.x;
            let h = if rem.abs() <= hmax {
                rem
            } else {
                // Avoid a sliver final step.
                let h = hmax.min(0.6 * rem.abs());
                h.copysign(rem)
            };
            cur = self.step(&cur, h, &mut buf)?;
            if !(cur.w.re.is_finite() && cur.w.im.is_finite()) {
                return Err(Error::PrecisionExhausted(f64::INFINITY));
            }
        }
        cur.x = x1;
        Ok(cur)
    }
}

/// `x = 2 sinh²(r/2) = cosh r - 1` without cancellation.
pub fn x_of_r(r: f64) -> f64 {
    let s = (0.5 * r).sinh();
    2.0 * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // P^{-1/2}_ν(cosh r) = sqrt(2/(π sinh r)) sinh((ν+1/2) r)/(ν+1/2)
    fn p_half(nu: Complex64, r: f64) -> (Complex64, Complex64) {
        let a = nu + 0.5;
        let pre = (2.0 / (PI * r.sinh())).sqrt();
        let v = pre * (a * r).sinh() / a;
        let d = pre * ((a * r).cosh() - 0.5 / r.tanh() * (a * r).sinh() / a);
        (v, d)
    }

    #[test]
    fn continues_half_order_closed_form() {
        for &nu in &[Complex64::new(2.0, 3.0), Complex64::new(-0.5, 20.0), Complex64::new(15.0, 0.0)] {
            let ode = LegendreOde::new(nu, 0.5);
            let (r0, r1) = (0.3, 1.7);
            let (v0, d0) = p_half(nu, r0);
            let st = ZState {
                x: x_of_r(r0),
                w: v0,
                dw: d0 / r0.sinh(),
                scale: 0.0,
                err: 0.0,
            };
            let out = ode.walk(st, x_of_r(r1)).unwrap();
            let (v1, d1) = p_half(nu, r1);
            let got = out.w * out.scale.exp();
            let gotd = out.dw * out.scale.exp() * r1.sinh();
            assert!((got - v1).norm() / v1.norm() < 1e-12, "{nu}: {got} vs {v1}");
            assert!((gotd - d1).norm() / d1.norm() < 1e-12);
            // and back again where neither solution dominates
            if nu.re != -0.5 {
                continue;
            }
            let back = ode.walk(out, x_of_r(r0)).unwrap();
            let gb = back.w * back.scale.exp();
            assert!((gb - v0).norm() / v0.norm() < 1e-10, "back {nu}: {gb} vs {v0}");
        }
    }
}
