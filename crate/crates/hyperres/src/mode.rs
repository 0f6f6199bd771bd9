//! Per-mode scattering data: multiplicities, the connection coefficients
//! `F^k_0(s)` and `F^k(s)`, the scattering eigenvalue `Λ_k(s)` and the
//! mode sum for `log|τ(s)|`.
//!
//! Notation: `k = l + (n-1)/2`, `ν = s - (n+1)/2`, so `k + ν + 1 = l + s`.
//! For `Re s ≥ n/2` everything is built from two Wronskians at `r0`,
//! `G(s) = sinh r0 W[**Q**^k_ν, u](r0)` and `A(s) = sinh r0 W[P^{-k}_ν, u](r0)`,
//! where `u` is the regular interior solution normalised like `P^{-k}`.
//! Then `F^k/F^k_0 = Γ(l+s) G(s)` and the other half-plane follows from the
//! `**Q**` reflection identity,
//! `F^k/F^k_0 (n-s) = F^k/F^k_0 (s) + C(s) A(s)`,
//! `C(s) = Γ(l+s) Γ(l+n-s) cos(πν)`.

use crate::error::{Error, Result};
use crate::ode::{OdeState, RadialOde};
use crate::phase::rho_min;
use crate::potential::Potential;
use crate::quad::{gauss_legendre, legendre_p};
use crate::scaled::Scaled;
use crate::special::gamma::{ln_gamma, ln_gamma_real, rgamma_scaled};
use crate::special::legendre::{cos_pi_scaled, p_minus, p_minus_grid, q_bold, q_bold_grid, sin_pi_scaled, Branch};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Dimension of the weight-`l` spherical harmonics on `S^n`; for `n = 1`
/// the Fourier modes `±l` are merged.
pub fn multiplicity(n: u32, l: u32) -> u64 {
    if n == 1 {
        return if l == 0 { 1 } else { 2 };
    }
    let lower = if l >= 2 { binomial(l + n - 2, n) } else { 0 };
    binomial(l + n, n) - lower
}

fn binomial(a: u32, b: u32) -> u64 {
    let b = b.min(a - b);
    let mut r: u128 = 1;
    for i in 0..b {
        r = r * (a - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

/// Order `k = l + (n-1)/2` of mode `l`.
pub fn order(n: u32, l: u32) -> f64 {
    l as f64 + 0.5 * (n as f64 - 1.0)
}

/// A spherical-harmonic mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeIndex {
    pub l: u32,
    pub k: f64,
    pub mu: u64,
}

impl ModeIndex {
    pub fn new(n: u32, l: u32) -> ModeIndex {
        ModeIndex {
            l,
            k: order(n, l),
            mu: multiplicity(n, l),
        }
    }
}

fn half(n: u32) -> f64 {
    0.5 * n as f64
}

fn degree(n: u32, s: Complex64) -> Complex64 {
    s - 0.5 * (n as f64 + 1.0)
}

/// `F^k_0(s) = 2^{k-1} Γ(k) / Γ(l+s)`; for `k = 0` the logarithmic
/// coefficient `1/Γ(s)` is used.
pub fn f0_coefficient(n: u32, l: u32, s: Complex64) -> Scaled {
    let k = order(n, l);
    let z = s + l as f64;
    if k == 0.0 {
        return rgamma_scaled(z);
    }
    let pre = (k - 1.0) * 2f64.ln() + ln_gamma_real(k);
    rgamma_scaled(z) * Scaled::from_log(Complex64::new(pre, 0.0))
}

/// Zeros of `F^k_0`: `s = -l - m`, `m = 0, 1, ...`, down to `s_min`.
pub fn f0_zeros(l: u32, s_min: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = -(l as f64);
    while s >= s_min {
        out.push(s);
        s -= 1.0;
    }
    out
}

/// Evaluation path for the perturbed coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Path {
    /// Wronskian of Legendre functions (constant profiles only).
    Closed,
    /// Numerical integration of the coefficient equation.
    Ode,
    /// Volterra series (`Re s ≥ n/2`, ratio only).
    Volterra,
}

impl Path {
    pub fn default_for(pot: &Potential) -> Path {
        if pot.step_amplitude().is_some() {
            Path::Closed
        } else {
            Path::Ode
        }
    }
}

/// `F^k(s)` as the ratio `F^k/F^k_0` and the factor `F^k_0`.
#[derive(Clone, Copy, Debug)]
pub struct Coefficient {
    pub ratio: Scaled,
    pub f0: Scaled,
    /// Estimated relative error of the ratio.
    pub err: f64,
    pub path: Path,
}

impl Coefficient {
    pub fn value(&self) -> Scaled {
        self.ratio * self.f0
    }
}

/// The two Wronskians at a point with `Re s ≥ n/2`.
#[derive(Clone, Copy, Debug)]
struct Wronskians {
    g: Scaled,
    a: Scaled,
    err: f64,
}

fn omega(shift: Complex64, c: Complex64) -> Complex64 {
    -0.5 + (shift * shift + c).sqrt()
}

fn wronskians(pot: &Potential, l: u32, s: Complex64, path: Path) -> Result<Wronskians> {
    let n = pot.n;
    let k = order(n, l);
    let nu = degree(n, s);
    if pot.is_zero() {
        return Ok(Wronskians {
            g: rgamma_scaled(s + l as f64),
            a: Scaled::ZERO,
            err: 0.0,
        });
    }
    let r0 = pot.r0;
    match path {
        Path::Closed => {
            let c = pot
                .step_amplitude()
                .ok_or_else(|| Error::InvalidInput("closed form needs a constant profile".into()))?;
            let om = omega(s - half(n), c);
            let p = p_minus(k, nu, r0)?;
            let q = q_bold(k, nu, r0)?;
            let u = p_minus(k, om, r0)?;
            let (g, eg) = Branch::wronskian(&q, &u);
            let (a, _) = Branch::wronskian(&p, &u);
            Ok(Wronskians {
                g: g * r0.sinh(),
                a: a * r0.sinh(),
                err: eg,
            })
        }
        Path::Ode => {
            let rm = pot.matching_radius();
            let om = omega(s - half(n), pot.value(rm));
            let ode = RadialOde::new(pot, k, nu);
            let state = |b: &Branch, r: f64| OdeState {
                r,
                v: b.v,
                d: b.d,
                scale: b.scale,
                steps: 0,
            };
            let branch = |st: &OdeState| Branch {
                v: st.v,
                d: st.d,
                scale: st.scale,
                err: 1e-9,
            };
            // Inward from r0 with the free outgoing solution, projected on
            // the regular interior solution at rm.
            let q = q_bold(k, nu, r0)?;
            let w = branch(&ode.integrate(state(&q, r0), rm)?);
            let u0 = p_minus(k, om, rm)?;
            let (g, cond) = Branch::wronskian(&w, &u0);
            if !(cond < 1e-2) || !g.is_finite() {
                return Err(Error::MatchingFailure {
                    r_min: rm,
                    condition: cond / 1e-9,
                });
            }
            // Outward regular solution for the interior Wronskian.
            let u = branch(&ode.integrate(state(&u0, rm), r0)?);
            let p = p_minus(k, nu, r0)?;
            let (a, _) = Branch::wronskian(&p, &u);
            Ok(Wronskians {
                g: g * rm.sinh(),
                a: a * r0.sinh(),
                err: cond,
            })
        }
        Path::Volterra => Err(Error::InvalidInput("the Volterra path yields only the ratio".into())),
    }
}

/// `C(s) = Γ(l+s) Γ(l+n-s) cos(πν)` with `w = l + n - s`:
/// `π sin(πk) Π_{j=1}^{2k} (j - w)` for `n` even,
/// `π (-1)^k cot(πw) Π_{j=1}^{2k} (j - w)` for `n` odd.
pub fn reflection_coefficient(n: u32, l: u32, s: Complex64) -> Result<Scaled> {
    let k = order(n, l);
    let w = -s + (l + n) as f64;
    let m = (2.0 * k).round() as u32;
    let mut prod = Scaled::real(PI);
    for j in 1..=m {
        prod = prod * (Complex64::new(j as f64, 0.0) - w);
    }
    if n % 2 == 0 {
        let sign = if ((k - 0.5) as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(prod * sign);
    }
    let sn = sin_pi_scaled(w);
    let cs = cos_pi_scaled(w);
    if sn.is_zero() || (sn.ln_abs() - cs.ln_abs()) < -20.0 {
        return Err(Error::LatticeSingularity(-w + (l + n) as f64));
    }
    let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(prod * (cs / sn) * sign)
}

fn check_right(n: u32, s: Complex64) -> Result<()> {
    if s.re < half(n) - 1e-12 {
        return Err(Error::InvalidInput(format!("expected Re s ≥ n/2, got s = {s}")));
    }
    Ok(())
}

/// `F^k(s)` along the requested path.
pub fn f_coefficient_path(pot: &Potential, l: u32, s: Complex64, path: Path) -> Result<Coefficient> {
    let n = pot.n;
    let f0 = f0_coefficient(n, l, s);
    if path == Path::Volterra {
        check_right(n, s)?;
        let v = volterra_coefficients(pot, l, s, 12)?;
        return Ok(Coefficient {
            ratio: Scaled::new(v.sum),
            f0,
            err: v.tail,
            path,
        });
    }
    let (ratio, err) = if s.re >= half(n) {
        let w = wronskians(pot, l, s, path)?;
        (gamma(s + l as f64)? * w.g, w.err)
    } else {
        let sr = -s + n as f64;
        let w = wronskians(pot, l, sr, path)?;
        let r = gamma(sr + l as f64)? * w.g;
        (r + reflection_coefficient(n, l, sr)? * w.a, w.err)
    };
    Ok(Coefficient { ratio, f0, err, path })
}

/// `F^k(s)` along the default path for the profile.
pub fn f_coefficient(pot: &Potential, l: u32, s: Complex64) -> Result<Coefficient> {
    f_coefficient_path(pot, l, s, Path::default_for(pot))
}

fn gamma(z: Complex64) -> Result<Scaled> {
    Ok(Scaled::from_log(ln_gamma(z)?))
}

/// Interior Wronskian `A(s)` (`Re s ≥ n/2`).
pub fn interior_wronskian(pot: &Potential, l: u32, s: Complex64) -> Result<Scaled> {
    check_right(pot.n, s)?;
    Ok(wronskians(pot, l, s, Path::default_for(pot))?.a)
}

/// The function whose zeros in `Re s < n/2` are the mode-`l` resonances:
/// `F^k/F^k_0` for `n` even (the zeros of `F^k_0` are not resonances) and
/// `F^k/(2^{k-1}Γ(k)) = G` for `n` odd.
pub fn zero_function(pot: &Potential, l: u32, s: Complex64) -> Result<Scaled> {
    zero_function_path(pot, l, s, Path::default_for(pot))
}

pub fn zero_function_path(pot: &Potential, l: u32, s: Complex64, path: Path) -> Result<Scaled> {
    let n = pot.n;
    let even = n % 2 == 0;
    if s.re >= half(n) {
        let w = wronskians(pot, l, s, path)?;
        return if even { Ok(gamma(s + l as f64)? * w.g) } else { Ok(w.g) };
    }
    let sr = -s + n as f64;
    let w = wronskians(pot, l, sr, path)?;
    let gr = gamma(sr + l as f64)?;
    if even {
        Ok(gr * w.g + reflection_coefficient(n, l, sr)? * w.a)
    } else {
        // G(s) = R(n-s)/Γ(l+s) + Γ(l+n-s) cos(πν') A(n-s), ν' = n-s-(n+1)/2.
        let r = gr * w.g;
        Ok(r * rgamma_scaled(s + l as f64) + gr * cos_pi_scaled(degree(n, sr)) * w.a)
    }
}

/// `F^k/F^k_0 = Γ(l+s)·G(s)` evaluated at `s` itself on any half plane,
/// without the reflection used by [`f_coefficient_path`]. Used as an
/// independent check of the scattering formula.
pub fn f_ratio_direct(pot: &Potential, l: u32, s: Complex64, path: Path) -> Result<Scaled> {
    let w = wronskians(pot, l, s, path)?;
    Ok(gamma(s + l as f64)? * w.g)
}

/// `Λ_k(s) = [F^k(n-s)/F^k(s)]·[F^k_0(s)/F^k_0(n-s)]` in scaled form.
pub fn lambda_mode(pot: &Potential, l: u32, s: Complex64) -> Result<Scaled> {
    let n = pot.n;
    if pot.is_zero() {
        return Ok(Scaled::ONE);
    }
    if s.re < half(n) {
        return Ok(lambda_mode(pot, l, -s + n as f64)?.recip());
    }
    let w = wronskians(pot, l, s, Path::default_for(pot))?;
    let r = gamma(s + l as f64)? * w.g;
    if r.is_zero() {
        return Err(Error::LatticeSingularity(s));
    }
    let c = reflection_coefficient(n, l, s)?;
    Ok((r + c * w.a) / r)
}

/// Truncated mode sum for `log|τ(s)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauSum {
    pub log_abs: f64,
    /// Last mode included.
    pub l_stop: u32,
}

fn cached_rho_min(r0: f64) -> Result<f64> {
    static CACHE: OnceLock<Mutex<Vec<(f64, f64)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    if let Some(&(_, v)) = cache.lock().expect("cache").iter().find(|e| e.0 == r0) {
        return Ok(v);
    }
    let v = rho_min(r0)?;
    cache.lock().expect("cache").push((r0, v));
    Ok(v)
}

/// `Σ_l μ_n(l) log|Λ_k(s)|`, stopped once the modes are past the curve
/// `H = 0` and the terms decay geometrically below `tol`.
pub fn log_tau(pot: &Potential, s: Complex64, tol: f64) -> Result<TauSum> {
    let n = pot.n;
    if pot.is_zero() {
        return Ok(TauSum { log_abs: 0.0, l_stop: 0 });
    }
    if s.re < half(n) {
        let t = log_tau(pot, -s + n as f64, tol)?;
        return Ok(TauSum {
            log_abs: -t.log_abs,
            l_stop: t.l_stop,
        });
    }
    let a = (s - half(n)).norm();
    let k_turn = a / cached_rho_min(pot.r0)?;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut l = 0u32;
    loop {
        let term = multiplicity(n, l) as f64 * lambda_mode(pot, l, s)?.ln_abs();
        sum += term;
        let small = term.abs();
        // A term that rounds to zero ends the sum once past the turning mode.
        let q = if small == 0.0 { 0.0 } else { small / prev };
        if order(n, l) > k_turn && q < 0.9 && small * q / (1.0 - q) < tol {
            return Ok(TauSum { log_abs: sum, l_stop: l });
        }
        prev = small;
        l += 1;
        if l > 100_000 {
            return Err(Error::SeriesDivergent(order(n, l)));
        }
    }
}

// ------------------------------------------------------------------ Volterra

/// Terms of the Volterra series for `F^k/F^k_0`.
#[derive(Clone, Debug)]
pub struct VolterraSeries {
    /// `F^k_j/F^k_0`, starting with `j = 0` (exactly 1).
    pub terms: Vec<Complex64>,
    pub partial_sums: Vec<Complex64>,
    pub sum: Complex64,
    /// Estimated truncation error relative to the sum.
    pub tail: f64,
}

const NODES: usize = 16;

struct Panel {
    x: [f64; NODES],
    w: [f64; NODES],
    /// `∫_{x_i}^{b} f ≈ Σ_j s[i][j] f(x_j)`, already scaled to the panel.
    s: [[f64; NODES]; NODES],
}

/// Spectral integration matrix on `[-1, 1]`: `∫_{u_i}^{1} f`.
fn integration_matrix() -> &'static (Vec<f64>, Vec<f64>, Vec<[f64; NODES]>) {
    static M: OnceLock<(Vec<f64>, Vec<f64>, Vec<[f64; NODES]>)> = OnceLock::new();
    M.get_or_init(|| {
        let (u, w) = gauss_legendre(NODES);
        let mut s = vec![[0.0; NODES]; NODES];
        for i in 0..NODES {
            // ∫_{u}^{1} P_0 = 1 - u; ∫_{u}^{1} P_m = -(P_{m+1}(u) - P_{m-1}(u))/(2m+1).
            let mut int = [0.0; NODES];
            int[0] = 1.0 - u[i];
            for m in 1..NODES {
                int[m] = -(legendre_p(m + 1, u[i]).0 - legendre_p(m - 1, u[i]).0) / (2 * m + 1) as f64;
            }
            for j in 0..NODES {
                // f ≈ Σ_m c_m P_m with c_m = (2m+1)/2 Σ_j w_j P_m(u_j) f_j.
                let mut v = 0.0;
                for m in 0..NODES {
                    v += int[m] * (2 * m + 1) as f64 * 0.5 * w[j] * legendre_p(m, u[j]).0;
                }
                s[i][j] = v;
            }
        }
        (u, w, s)
    })
}

fn make_panel(a: f64, b: f64) -> Panel {
    let (u, w, s) = integration_matrix();
    let h = 0.5 * (b - a);
    let mut p = Panel {
        x: [0.0; NODES],
        w: [0.0; NODES],
        s: [[0.0; NODES]; NODES],
    };
    for i in 0..NODES {
        p.x[i] = a + h * (u[i] + 1.0);
        p.w[i] = h * w[i];
        for j in 0..NODES {
            p.s[i][j] = h * s[i][j];
        }
    }
    p
}

/// Value normalised by the smooth envelope `(|w|² + |w'|²)^{1/2}`.
fn envelope(b: &Branch) -> (Complex64, f64) {
    let m = (b.v.norm_sqr() + b.d.norm_sqr()).sqrt();
    (b.v / m, b.scale + m.ln())
}

/// Volterra series for `F^k/F^k_0` at `Re s ≥ n/2`:
/// `w_{j+1}(r) = ∫_r^{r0} Γ(k+ν+1) sinh t V(t) [P(t)**Q**(r) - P(r)**Q**(t)] w_j(t) dt`,
/// `w_0 = **Q**`, and `F^k_j/F^k_0 = lim_{r→0} w_j/**Q**`.
pub fn volterra_coefficients(pot: &Potential, l: u32, s: Complex64, j_max: usize) -> Result<VolterraSeries> {
    let n = pot.n;
    check_right(n, s)?;
    let k = order(n, l);
    let nu = degree(n, s);
    let r0 = pot.r0;
    let one = Complex64::new(1.0, 0.0);
    if pot.is_zero() || j_max == 0 {
        return Ok(VolterraSeries {
            terms: vec![one],
            partial_sums: vec![one],
            sum: one,
            tail: 0.0,
        });
    }
    let gam = gamma(nu + k + 1.0)?;
    // Panels over [r_lo, r0]; |Δ log(P/Q)| ≲ 1.2 per panel.
    let r_lo = 1e-4 * r0;
    let lam = (nu + 0.5) * (nu + 0.5);
    let mut edges = vec![r0];
    let mut b = r0;
    while b > r_lo {
        let sh = b.sinh();
        let rate = 2.0 * (lam + k.max(0.5).powi(2) / (sh * sh) + pot.value(b)).sqrt().norm() + 1.0;
        let h = (1.2 / rate).min(0.5 * b);
        b = (b - h).max(r_lo);
        if b - r_lo < 0.1 * h {
            b = r_lo;
        }
        edges.push(b);
    }
    edges.reverse();
    let panels: Vec<Panel> = edges.windows(2).map(|e| make_panel(e[0], e[1])).collect();
    let rs: Vec<f64> = panels.iter().flat_map(|p| p.x.iter().copied()).collect();
    let ps = p_minus_grid(k, nu, &rs)?;
    let qs = q_bold_grid(k, nu, &rs)?;
    let m = rs.len();
    let mut pn = vec![Complex64::default(); m];
    let mut qn = vec![Complex64::default(); m];
    let mut mm = vec![Complex64::default(); m];
    let mut lq = vec![0.0; m];
    let mut sv = vec![Complex64::default(); m];
    for i in 0..m {
        let (p, sp) = envelope(&ps[i]);
        let (q, sq) = envelope(&qs[i]);
        pn[i] = p;
        qn[i] = q;
        mm[i] = gam.mul_exp(Complex64::new(sp + sq, 0.0)).to_complex();
        lq[i] = 2.0 * sq;
        sv[i] = pot.value(rs[i]) * rs[i].sinh();
    }
    let mut omega: Vec<Complex64> = qn.clone();
    let mut terms = vec![one];
    let mut sums = vec![one];
    let mut sum = one;
    let mut tail = f64::INFINITY;
    for _ in 0..j_max {
        let f1: Vec<Complex64> = (0..m).map(|i| mm[i] * sv[i] * pn[i] * omega[i]).collect();
        let f2: Vec<Complex64> = (0..m).map(|i| sv[i] * qn[i] * omega[i]).collect();
        let mut next = vec![Complex64::default(); m];
        let mut ip = Complex64::default();
        // ∫_b^{r0} f2 e^{L} = jm · e^{je}.
        let (mut jm, mut je) = (Complex64::default(), 0.0);
        for (pi, panel) in panels.iter().enumerate().rev() {
            let base = pi * NODES;
            let lref = lq[base + NODES - 1];
            let g: Vec<Complex64> = (0..NODES).map(|j| f2[base + j] * (lq[base + j] - lref).exp()).collect();
            for i in 0..NODES {
                let mut a1 = Complex64::default();
                let mut a2 = Complex64::default();
                for j in 0..NODES {
                    a1 += f1[base + j] * panel.s[i][j];
                    a2 += g[j] * panel.s[i][j];
                }
                let idx = base + i;
                let i_p = ip + a1;
                let i_t = jm * (je - lq[idx]).exp() + a2 * (lref - lq[idx]).exp();
                next[idx] = qn[idx] * i_p - pn[idx] * mm[idx] * i_t;
            }
            let mut w1 = Complex64::default();
            let mut w2 = Complex64::default();
            for j in 0..NODES {
                w1 += f1[base + j] * panel.w[j];
                w2 += g[j] * panel.w[j];
            }
            ip += w1;
            jm = jm * (je - lref).exp() + w2;
            je = lref;
        }
        terms.push(ip);
        sum += ip;
        sums.push(sum);
        omega = next;
        let j = terms.len() - 1;
        let t = ip.norm() / sum.norm();
        if t < 1e-15 {
            tail = t;
            break;
        }
        if j >= 3 {
            let q1 = terms[j].norm() / terms[j - 1].norm();
            let q2 = terms[j - 1].norm() / terms[j - 2].norm();
            let q = q1.max(q2);
            tail = if q < 0.9 { t * q / (1.0 - q) } else { f64::INFINITY };
            if tail < 1e-13 {
                break;
            }
        }
    }
    if !(tail < 1e-8) {
        return Err(Error::SeriesDivergent(k));
    }
    Ok(VolterraSeries {
        terms,
        partial_sums: sums,
        sum,
        tail,
    })
}
