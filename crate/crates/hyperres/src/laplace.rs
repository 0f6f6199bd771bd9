//! Laplace's method for `I(k) = ∫_a^b e^{2kφ(t)} u(t) dt` with the maximum
//! of `Re φ` at `b`, compared against `f(k) = A Γ(σ) (2kφ'(b))^{-σ} e^{2kφ(b)}`.

use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::scaled::Scaled;
use crate::special::gamma::gamma_real;
use num_complex::Complex64;

/// An endpoint Laplace integral. `u(t) ~ A (b - t)^{σ-1}` as `t → b`.
pub struct LaplaceProblem<'a> {
    pub a: f64,
    pub b: f64,
    pub phi: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
    pub phi_prime: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
    pub amplitude: Complex64,
    pub sigma: f64,
    pub u: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
}

/// `I`, `f` and `I/f`.
#[derive(Clone, Copy, Debug)]
pub struct LaplaceComparison {
    pub integral: Scaled,
    pub leading: Scaled,
    pub ratio: Complex64,
    /// Number of geometric panels used.
    pub panels: usize,
}

impl<'a> LaplaceProblem<'a> {
    /// Checks `a < b`, `σ ≥ 1` and `Re φ' > 0` on a sample grid.
    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) {
            return Err(Error::InvalidInput(format!("need a < b, got [{}, {}]", self.a, self.b)));
        }
        if !(self.sigma >= 1.0) {
            return Err(Error::InvalidInput(format!("need σ ≥ 1, got {}", self.sigma)));
        }
        for i in 0..=64 {
            let t = self.a + (self.b - self.a) * i as f64 / 64.0;
            if !((self.phi_prime)(t).re > 0.0) {
                return Err(Error::InvalidInput(format!("Re φ' ≤ 0 at t = {t}")));
            }
        }
        Ok(())
    }
}

/// `I(k)` by adaptive quadrature on panels `[b - 2^{j+1}h, b - 2^j h]`
/// growing away from `b`, with `h = 1/(k|φ'(b)|)`; the factor `e^{2kφ(b)}`
/// is carried in log form.
pub fn laplace_compare(prob: &LaplaceProblem, k: f64) -> Result<LaplaceComparison> {
    prob.validate()?;
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("need k > 0, got {k}")));
    }
    let (a, b) = (prob.a, prob.b);
    let pb = (prob.phi)(b);
    let dpb = (prob.phi_prime)(b);
    let h = 1.0 / (k * dpb.norm());
    let f = |t: f64| ((prob.phi)(t) - pb).scale(2.0 * k).exp() * (prob.u)(t);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut hi = b;
    let mut width = h.min(b - a);
    let mut panels = 0;
    let mut log = Vec::new();
    while hi > a {
        let lo = (hi - width).max(a);
        let r = integrate(f, lo, hi, 1e-15 * sum.norm().max(1e-300), 1e-12, 2000).map_err(|e| {
            Error::OscillatoryFailure(format!("panel [{lo}, {hi}] failed ({e}); previous panels {log:?}"))
        })?;
        sum += r.value;
        log.push((lo, r.value.norm()));
        panels += 1;
        // Past the peak the panels decay at least like e^{-2k Re φ'·dist}.
        if r.value.norm() < 1e-18 * sum.norm() && (b - lo) * k * dpb.re > 40.0 {
            break;
        }
        hi = lo;
        width *= 2.0;
        if panels > 200 {
            return Err(Error::OscillatoryFailure(format!("no convergence after {panels} panels: {log:?}")));
        }
    }
    let integral = Scaled::from_log(pb * (2.0 * k)) * sum;
    let z = dpb * (2.0 * k);
    let leading = Scaled::from_log(pb * (2.0 * k) - z.ln() * prob.sigma) * (prob.amplitude * gamma_real(prob.sigma));
    let ratio = sum / (prob.amplitude * gamma_real(prob.sigma) * (-z.ln() * prob.sigma).exp());
    Ok(LaplaceComparison {
        integral,
        leading,
        ratio,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(phase: Complex64, sigma: f64) -> LaplaceProblem<'static> {
        LaplaceProblem {
            a: 0.0,
            b: 1.0,
            phi: Box::new(move |t| phase * t),
            phi_prime: Box::new(move |_| phase),
            amplitude: Complex64::new(1.0, 0.0),
            sigma,
            u: Box::new(move |t| Complex64::new((1.0 - t).powf(sigma - 1.0), 0.0)),
        }
    }

    #[test]
    fn exponential_ratio_is_exact() {
        let p = linear(Complex64::new(1.0, 0.0), 1.0);
        for k in [0.5, 3.0, 20.0] {
            let c = laplace_compare(&p, k).unwrap();
            assert!((c.ratio - (1.0 - (-2.0 * k).exp())).norm() < 1e-12, "k {k}");
        }
    }

    #[test]
    fn incomplete_gamma_oracle() {
        // σ = 2: I/f = 1 - (1 + 2k) e^{-2k}.
        let p = linear(Complex64::new(1.0, 0.0), 2.0);
        for k in [1.0, 5.0, 200.0] {
            let c = laplace_compare(&p, k).unwrap();
            let exact = 1.0 - (1.0 + 2.0 * k) * (-2.0 * k).exp();
            assert!((c.ratio.re - exact).abs() < 1e-12 && c.ratio.im.abs() < 1e-12);
        }
    }

    #[test]
    fn huge_exponents_stay_in_log_form() {
        let p = linear(Complex64::new(1.0, 0.0), 1.0);
        let c = laplace_compare(&p, 1e4).unwrap();
        assert!((c.integral.ln_abs() - (2e4 - (2e4f64).ln())).abs() < 1e-9);
        assert!((c.ratio - 1.0).norm() < 1e-12);
    }

    #[test]
    fn complex_phase_converges() {
        let ph = Complex64::from_polar(1.0, std::f64::consts::PI / 6.0);
        let p = LaplaceProblem {
            u: Box::new(|t| Complex64::new(1.0 + t * t, 0.0)),
            amplitude: Complex64::new(2.0, 0.0),
            ..linear(ph, 1.0)
        };
        let mut last = f64::INFINITY;
        for k in [50.0, 100.0, 200.0] {
            let e = (laplace_compare(&p, k).unwrap().ratio - 1.0).norm();
            assert!(e < last, "k {k}: {e}");
            last = e;
        }
    }

    #[test]
    fn rejects_bad_problems() {
        let p = linear(Complex64::new(-1.0, 0.0), 1.0);
        assert!(matches!(laplace_compare(&p, 5.0), Err(Error::InvalidInput(_))));
        let q = linear(Complex64::new(1.0, 0.0), 0.5);
        assert!(q.validate().is_err());
    }
}
