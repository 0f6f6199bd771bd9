//! Liouville phase `φ(α, r)`, the auxiliary functions `p(α)`, `q(α)`, the
//! growth exponent `H(α, r)`, its zero curve `ϱ(θ)`, the indicator function
//! `h_{r0}(θ)` and the Weyl constants.
//!
//! All logarithms and square roots use principal branches. `H` is computed
//! without routing through `q`, whose `log((1-α)/(1+α))` factor crosses its
//! cut on the real axis `α > 1`.

use crate::error::{Error, Result};
use crate::quad::{integrate_real, integrate_tail};
use crate::special::gamma::gamma_real;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Phase data at one `(α, r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseValues {
    pub phi: Complex64,
    pub phi_prime_r: Complex64,
    pub p: Complex64,
    pub q: Complex64,
    /// `ζ` with `(2/3) ζ^{3/2} = φ`.
    pub zeta: Complex64,
    /// True when `α` is real and `> 1`, where `q` sits on its branch cut.
    pub q_on_cut: bool,
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    if (alpha - 1.0).norm() < 1e-14 || (alpha + 1.0).norm() < 1e-14 {
        return Err(Error::BranchPoint(alpha));
    }
    Ok(())
}

fn root(alpha: Complex64, r: f64) -> Complex64 {
    let sh = r.sinh();
    (1.0 + alpha * alpha * sh * sh).sqrt()
}

/// `(cosh r - S)/(cosh r + S)` with `S = √(1 + α² sinh² r)`, using
/// `cosh r - S = sinh² r (1 - α²)/(cosh r + S)` to avoid cancellation.
fn cs_ratio(alpha: Complex64, r: f64, s: Complex64) -> Complex64 {
    let c = r.cosh();
    let sh = r.sinh();
    let plus = c + s;
    if plus.norm() < 0.5 * c {
        return (c - s) / plus;
    }
    sh * sh * (1.0 - alpha * alpha) / (plus * plus)
}

/// `p(α) = (α/2) log((α+1)/(α-1)) + (1/2) log(1-α²)`.
pub fn p_alpha(alpha: Complex64) -> Complex64 {
    alpha * 0.5 * ((alpha + 1.0) / (alpha - 1.0)).ln() + 0.5 * (1.0 - alpha * alpha).ln()
}

/// `q(α) = α log(α/√(α²-1)) + (1/2) log((1-α)/(1+α))`.
pub fn q_alpha(alpha: Complex64) -> Complex64 {
    alpha * (alpha / (alpha * alpha - 1.0).sqrt()).ln() + 0.5 * ((1.0 - alpha) / (1.0 + alpha)).ln()
}

/// `φ(α, r)`.
pub fn phi(alpha: Complex64, r: f64) -> Complex64 {
    let s = root(alpha, r);
    let c = r.cosh();
    alpha * ((alpha * c + s) / (alpha * alpha - 1.0).sqrt()).ln() + 0.5 * cs_ratio(alpha, r, s).ln()
}

/// `∂_r φ = √(1 + α² sinh² r) / sinh r`.
pub fn phi_prime(alpha: Complex64, r: f64) -> Complex64 {
    root(alpha, r) / r.sinh()
}

/// All phase quantities at `(α, r)`.
pub fn phase(alpha: Complex64, r: f64) -> Result<PhaseValues> {
    check_alpha(alpha)?;
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("phase needs r > 0, got {r}")));
    }
    let ph = phi(alpha, r);
    Ok(PhaseValues {
        phi: ph,
        phi_prime_r: phi_prime(alpha, r),
        p: p_alpha(alpha),
        q: q_alpha(alpha),
        zeta: (ph * 1.5).powf(2.0 / 3.0),
        q_on_cut: alpha.im == 0.0 && alpha.re > 1.0,
    })
}

/// `H(α, r)` by its defining formula.
pub fn exponent_h_def(alpha: Complex64, r: f64) -> f64 {
    let s = root(alpha, r);
    let c = r.cosh();
    (2.0 * alpha * (alpha * c + s).ln() - alpha * (alpha * alpha - 1.0).ln()).re + cs_ratio(alpha, r, s).norm().ln()
}

/// `H = Re[2φ - 2p + (α+1) log(α+1) - (α-1) log(α-1)]`.
pub fn exponent_h_phase(alpha: Complex64, r: f64) -> f64 {
    (2.0 * phi(alpha, r) - 2.0 * p_alpha(alpha) + (alpha + 1.0) * (alpha + 1.0).ln()
        - (alpha - 1.0) * (alpha - 1.0).ln())
    .re
}

/// `H(α, r)`, checking the branch points.
pub fn exponent_h(alpha: Complex64, r: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(exponent_h_def(alpha, r))
}

/// `∂_r H = 2 Re φ'`.
pub fn exponent_h_dr(alpha: Complex64, r: f64) -> f64 {
    2.0 * phi_prime(alpha, r).re
}

/// `H` along the ray `x e^{iθ}`, stepping around the branch points `±1`.
fn h_ray(x: f64, theta: f64, r0: f64) -> f64 {
    let a = Complex64::from_polar(x, theta);
    if (a - 1.0).norm() < 1e-12 || (a + 1.0).norm() < 1e-12 {
        return exponent_h_def(Complex64::from_polar(x * (1.0 + 1e-10), theta), r0);
    }
    exponent_h_def(a, r0)
}

/// Zero curve `ϱ(θ)`: the `x > 0` with `H(x e^{iθ}, r0) = 0`.
pub fn rho_curve(theta: f64, r0: f64) -> Result<f64> {
    if !(theta.abs() <= 0.5 * PI + 1e-12) || !(r0 > 0.0) {
        return Err(Error::InvalidInput(format!("rho_curve needs |θ| ≤ π/2, r0 > 0 (θ = {theta}, r0 = {r0})")));
    }
    let theta = theta.clamp(-0.5 * PI, 0.5 * PI);
    if (theta.abs() - 0.5 * PI).abs() < 1e-15 {
        return Ok(1.0 / r0.sinh());
    }
    let (mut lo, mut hi) = (1e-3 / r0.sinh(), 1e3);
    let (mut hlo, mut hhi) = (h_ray(lo, theta, r0), h_ray(hi, theta, r0));
    if !(hlo < 0.0 && hhi > 0.0) {
        return Err(Error::BracketFailure {
            theta,
            lo,
            hi,
            h_lo: hlo,
            h_hi: hhi,
        });
    }
    // Bisection in log x, finished by secant steps.
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let hm = h_ray(mid, theta, r0);
        if hm < 0.0 {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
            hhi = hm;
        }
        if hi / lo - 1.0 < 1e-3 {
            break;
        }
    }
    let mut x = lo - hlo * (hi - lo) / (hhi - hlo);
    for _ in 0..50 {
        let hx = h_ray(x, theta, r0);
        if hx.abs() < 1e-14 {
            break;
        }
        if hx < 0.0 {
            lo = x;
            hlo = hx;
        } else {
            hi = x;
            hhi = hx;
        }
        let nx = lo - hlo * (hi - lo) / (hhi - hlo);
        if (nx - x).abs() < 1e-16 * x {
            x = nx;
            break;
        }
        x = nx;
    }
    Ok(x)
}

/// `h_{r0}(θ) = (2/Γ(n)) ∫_{ϱ(θ)}^∞ H(x e^{iθ}, r0) x^{-n-2} dx`.
pub fn indicator(theta: f64, r0: f64, n: u32) -> Result<f64> {
    let rho = rho_curve(theta, r0)?;
    let nn = n as i32;
    let v = integrate_tail(
        |x| h_ray(x, theta, r0).max(0.0) * x.powi(-nn - 2),
        rho,
        1e-12,
        1e-12,
    )?;
    Ok(2.0 / gamma_real(n as f64) * v)
}

/// `(A0, An)`: the model constant and `A0 + ((n+1)/2π) ∫ h dθ`.
pub fn weyl_constant(n: u32, r0: f64) -> Result<(f64, f64)> {
    let a0 = background_constant(n);
    // h is even; integrate over [0, π/2] and double.
    let integral = integrate_real(
        |t| indicator(t, r0, n).unwrap_or(f64::NAN),
        0.0,
        0.5 * PI,
        1e-10,
        1e-10,
    )?;
    if !integral.is_finite() {
        return Err(Error::OscillatoryFailure("indicator quadrature produced a non-finite value".into()));
    }
    Ok((a0, a0 + (n as f64 + 1.0) / (2.0 * PI) * 2.0 * integral))
}

/// `A_n^{(0)} = 2/(n+1)!` for `n` odd, `0` for `n` even.
pub fn background_constant(n: u32) -> f64 {
    if n % 2 == 1 {
        2.0 / gamma_real(n as f64 + 2.0)
    } else {
        0.0
    }
}

/// `h'_{r0}(-π/2+) = (4/Γ(n)) ∫_{1/sinh r0}^∞ x^{-(n+1)} log((x cosh r0 + √(x² sinh² r0 - 1))/√(x²+1)) dx`,
/// obtained by differentiating the indicator integral under the sign using
/// `∂_θ H = 2x log|x cosh r0 + √(x² sinh² r0 - 1)| - x log(x²+1)` at `θ = -π/2`.
pub fn indicator_edge_derivative(n: u32, r0: f64) -> Result<f64> {
    let (sh, ch) = (r0.sinh(), r0.cosh());
    let x0 = 1.0 / sh;
    let nn = n as i32;
    let f = |x: f64| {
        let d = (x * x * sh * sh - 1.0).max(0.0).sqrt();
        x.powi(-nn - 1) * ((x * ch + d) / (x * x + 1.0).sqrt()).ln()
    };
    // x = x0 / (1 - w²) removes the square-root behaviour at the endpoint.
    let v = integrate_real(
        |w| {
            let u = 1.0 - w * w;
            if u <= 0.0 {
                return 0.0;
            }
            f(x0 / u) * x0 / (u * u) * 2.0 * w
        },
        0.0,
        1.0,
        1e-12,
        1e-12,
    )?;
    Ok(4.0 / gamma_real(n as f64) * v)
}

/// Indicator values on a uniform grid of `[-π/2, π/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorTable {
    pub theta: Vec<f64>,
    pub h: Vec<f64>,
    pub rho: Vec<f64>,
    pub r0: f64,
    pub n: u32,
}

impl IndicatorTable {
    pub fn compute(n: u32, r0: f64, points: usize) -> Result<IndicatorTable> {
        let points = points.max(2);
        let theta: Vec<f64> = (0..points)
            .map(|i| -0.5 * PI + PI * i as f64 / (points - 1) as f64)
            .collect();
        let rows: Result<Vec<(f64, f64)>> = theta
            .par_iter()
            .map(|&t| Ok((indicator(t, r0, n)?, rho_curve(t, r0)?)))
            .collect();
        let (h, rho) = rows?.into_iter().unzip();
        Ok(IndicatorTable { theta, h, rho, r0, n })
    }

    /// CSV with header `theta,h,rho`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,h,rho\n");
        for i in 0..self.theta.len() {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", self.theta[i], self.h[i], self.rho[i]));
        }
        s
    }
}

/// `min_θ ϱ(θ)` over a grid (used to size the mode cutoff).
pub fn rho_min(r0: f64) -> Result<f64> {
    let mut m = f64::INFINITY;
    for i in 0..=90 {
        let t = 0.5 * PI * i as f64 / 90.0;
        m = m.min(rho_curve(t, r0)?);
    }
    Ok(m)
}
