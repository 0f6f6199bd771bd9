//! Counting functions, sectorial counts, Weyl fits and the contour-integral
//! cross-check.

use crate::error::{Error, Result};
use crate::mode::log_tau;
use crate::phase::{background_constant, indicator, indicator_edge_derivative, weyl_constant};
use crate::potential::Potential;
use crate::quad::integrate_real;
use crate::resonance::{fmt17, Resonance, ResonanceSet};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Model multiplicity `m₀(-k) = (2k+1)(k+1)⋯(k+n-1)/n!` (`n` odd).
pub fn background_multiplicity(n: u32, k: u64) -> u64 {
    if n % 2 == 0 {
        return 0;
    }
    let mut num: u128 = 2 * k as u128 + 1;
    let mut den: u128 = 1;
    for j in 1..n as u128 {
        num *= k as u128 + j;
    }
    for j in 1..=n as u128 {
        den *= j;
    }
    (num / den) as u64
}

/// Background resonances `(-k, m₀(-k))` with `|-k - n/2| ≤ t_max`.
pub fn background_set(n: u32, t_max: f64) -> Vec<(f64, u64)> {
    if n % 2 == 0 {
        return Vec::new();
    }
    let half = 0.5 * n as f64;
    (0..)
        .map(|k: u64| (k, k as f64 + half))
        .take_while(|&(_, d)| d <= t_max)
        .map(|(k, _)| (-(k as f64), background_multiplicity(n, k)))
        .collect()
}

/// Distances from `n/2` with weights, sorted ascending.
fn weighted_radii(set: &ResonanceSet) -> Vec<(f64, u64)> {
    let c = Complex64::new(0.5 * set.n as f64, 0.0);
    let mut v: Vec<(f64, u64)> = set
        .resonances
        .iter()
        .chain(set.eigenvalues.iter())
        .map(|r| ((r.zeta() - c).norm(), r.total_multiplicity))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// `Ñ(a) = (n+1) ∫₀^a (N(t) - N(0))/t dt` for a step function with jumps
/// `w` at radii `d`, integrated exactly.
fn integrated_count(n: u32, radii: &[(f64, u64)], a: f64) -> f64 {
    let mut acc = 0.0;
    for &(d, w) in radii {
        if d > 0.0 && d <= a {
            acc += w as f64 * (a / d).ln();
        }
    }
    (n as f64 + 1.0) * acc
}

/// `(N(t), Ñ(t))` from a resonance set.
pub fn counting_function(set: &ResonanceSet, t: f64) -> Result<(u64, f64)> {
    if t > set.t_max {
        return Err(Error::InsufficientData { t, t_max: set.t_max });
    }
    let radii = weighted_radii(set);
    let n: u64 = radii.iter().filter(|r| r.0 <= t).map(|r| r.1).sum();
    Ok((n, integrated_count(set.n, &radii, t)))
}

/// `(N₀(t), Ñ₀(t))` for the model operator.
pub fn background_counting(n: u32, t: f64) -> (u64, f64) {
    let radii: Vec<(f64, u64)> = background_set(n, t)
        .into_iter()
        .map(|(x, m)| (0.5 * n as f64 - x, m))
        .collect();
    (radii.iter().map(|r| r.1).sum(), integrated_count(n, &radii, t))
}

/// `A_n(r0)`, or the model constant when the set belongs to `V = 0`.
fn leading_constant(set: &ResonanceSet, r0: f64) -> Result<f64> {
    if Potential::from_config(set.n, &set.potential)?.is_zero() {
        return Ok(background_constant(set.n));
    }
    Ok(weyl_constant(set.n, r0)?.1)
}

/// Sampled counting data.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingTable {
    pub t_grid: Vec<f64>,
    pub n_count: Vec<u64>,
    pub n0: Vec<u64>,
    pub n_integrated: Vec<f64>,
    pub weyl: Vec<f64>,
}

impl CountingTable {
    /// Samples on `points` equispaced radii in `(0, t_max]`.
    pub fn compute(set: &ResonanceSet, r0: f64, points: usize) -> Result<CountingTable> {
        let an = leading_constant(set, r0)?;
        let points = points.max(1);
        let t_grid: Vec<f64> = (1..=points).map(|i| set.t_max * i as f64 / points as f64).collect();
        let mut tab = CountingTable {
            t_grid: t_grid.clone(),
            n_count: Vec::new(),
            n0: Vec::new(),
            n_integrated: Vec::new(),
            weyl: Vec::new(),
        };
        for &t in &t_grid {
            let (nv, nt) = counting_function(set, t)?;
            tab.n_count.push(nv);
            tab.n0.push(background_counting(set.n, t).0);
            tab.n_integrated.push(nt);
            tab.weyl.push(an * t.powi(set.n as i32 + 1));
        }
        Ok(tab)
    }

    /// CSV with header `t,N,N0,N_tilde,weyl_pred`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,N,N0,N_tilde,weyl_pred\n");
        for i in 0..self.t_grid.len() {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(self.t_grid[i]),
                self.n_count[i],
                self.n0[i],
                fmt17(self.n_integrated[i]),
                fmt17(self.weyl[i])
            ));
        }
        s
    }
}

fn angle(r: &Resonance, n: u32) -> f64 {
    // arg(ζ - n/2) taken in [0, 2π) so the resonance half plane is [π/2, 3π/2].
    let a = (r.zeta() - Complex64::new(0.5 * n as f64, 0.0)).arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn in_sector(a: f64, theta1: f64, theta2: f64) -> bool {
    // Ties at θ1 go to the interval on the left, except at the outer edge.
    (a > theta1 || (theta1 <= 0.5 * PI && a >= theta1)) && a <= theta2
}

/// Multiplicity-weighted count of resonances with `|ζ - n/2| ≤ t` and
/// `arg(ζ - n/2) ∈ [θ1, θ2]`, with its averaged version
/// `(n+1) ∫₀^t N(t', θ1, θ2)/t' dt'`.
pub fn sector_count(set: &ResonanceSet, t: f64, theta1: f64, theta2: f64) -> Result<(u64, f64)> {
    if !(0.5 * PI - 1e-12 <= theta1 && theta1 < theta2 && theta2 <= 1.5 * PI + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "sector needs π/2 ≤ θ1 < θ2 ≤ 3π/2, got [{theta1}, {theta2}]"
        )));
    }
    if t > set.t_max {
        return Err(Error::InsufficientData { t, t_max: set.t_max });
    }
    let c = Complex64::new(0.5 * set.n as f64, 0.0);
    let radii: Vec<(f64, u64)> = set
        .resonances
        .iter()
        .filter(|r| in_sector(angle(r, set.n), theta1, theta2))
        .map(|r| ((r.zeta() - c).norm(), r.total_multiplicity))
        .collect();
    let count = radii.iter().filter(|r| r.0 <= t).map(|r| r.1).sum();
    Ok((count, integrated_count(set.n, &radii, t)))
}

/// Centered difference of the indicator with step `1e-4`.
fn indicator_derivative(theta: f64, r0: f64, n: u32) -> Result<f64> {
    let h = 1e-4;
    Ok((indicator(theta + h, r0, n)? - indicator(theta - h, r0, n)?) / (2.0 * h))
}

/// Predicted sectorial count at radius `t`.
pub fn sector_prediction(n: u32, r0: f64, theta1: f64, theta2: f64, t: f64) -> Result<f64> {
    for th in [theta1, theta2] {
        if (th - PI).abs() < 1e-9 {
            return Err(Error::NonDifferentiableAngle(th));
        }
    }
    if !(0.5 * PI - 1e-12 <= theta1 && theta1 < theta2 && theta2 <= 1.5 * PI + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "sector needs π/2 ≤ θ1 < θ2 ≤ 3π/2, got [{theta1}, {theta2}]"
        )));
    }
    let m = n as f64 + 1.0;
    let tp = t.powf(m);
    // Background zeros sit on arg = π.
    let n0 = if theta1 < PI && PI <= theta2 {
        background_counting(n, t).0 as f64
    } else {
        0.0
    };
    let (a, b) = (theta1 - PI, theta2 - PI);
    let integral = integrate_real(|x| indicator(x, r0, n).unwrap_or(f64::NAN), a, b, 1e-10, 1e-10)?;
    if !integral.is_finite() {
        return Err(Error::OscillatoryFailure("indicator quadrature over the sector".into()));
    }
    let edge = |th: f64| -> Result<f64> {
        if (th + 0.5 * PI).abs() < 1e-4 {
            indicator_edge_derivative(n, r0)
        } else if (th - 0.5 * PI).abs() < 1e-4 {
            Ok(-indicator_edge_derivative(n, r0)?)
        } else {
            indicator_derivative(th, r0, n)
        }
    };
    let mut corr = 0.0;
    if theta2 < 1.5 * PI - 1e-12 {
        corr += edge(b)?;
    }
    if theta1 > 0.5 * PI + 1e-12 {
        corr -= edge(a)?;
    }
    Ok(n0 + m * tp / (2.0 * PI) * integral + tp / (2.0 * PI * m) * corr)
}

/// Measured against predicted sector count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub theta1: f64,
    pub theta2: f64,
    pub measured: f64,
    pub predicted: f64,
    pub ratio: f64,
}

pub fn sector_report(set: &ResonanceSet, r0: f64, theta1: f64, theta2: f64, t: f64) -> Result<SectorReport> {
    let (m, _) = sector_count(set, t, theta1, theta2)?;
    let p = sector_prediction(set.n, r0, theta1, theta2, t)?;
    Ok(SectorReport {
        theta1,
        theta2,
        measured: m as f64,
        predicted: p,
        ratio: m as f64 / p,
    })
}

/// Both sides of the contour identity at radius `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourCheck {
    /// Radius actually used (snapped away from the half-integers).
    pub a: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / a^{n+1}`.
    pub scaled_gap: f64,
    /// True when integrand values near `θ = ±π/2` were extrapolated.
    pub extrapolated: bool,
}

/// Move `a` to distance `0.23` from `ℤ/2` (the nearer of the two choices).
pub fn snap_radius(a: f64) -> f64 {
    let base = (2.0 * a).floor() / 2.0;
    let cands = [base - 0.27, base + 0.23, base + 0.27, base + 0.73];
    *cands
        .iter()
        .filter(|c| **c > 0.0)
        .min_by(|x, y| (*x - a).abs().total_cmp(&(*y - a).abs()))
        .expect("positive candidate")
}

const THETA_NODES: usize = 61;
const EDGE_GUARD: f64 = 0.02;

/// `Ñ(a)` from `set` against `A0 a^{n+1} + ((n+1)/2π) ∫ log|τ(n/2 + a e^{iθ})| dθ`.
pub fn contour_check(pot: &Potential, set: &ResonanceSet, a: f64, tol: f64) -> Result<ContourCheck> {
    let a = snap_radius(a);
    let (_, lhs) = counting_function(set, a)?;
    let n = pot.n;
    let (x, w) = crate::quad::gauss_legendre(THETA_NODES);
    let lim = 0.5 * PI - EDGE_GUARD;
    let c = Complex64::new(0.5 * n as f64, 0.0);
    // Gauss nodes on [-π/2, π/2]; nodes past the guard use the value at
    // the guard angle (the integrand is continuous there).
    let nodes: Vec<(f64, f64, bool)> = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let th = 0.5 * PI * xi;
            (th.clamp(-lim, lim), 0.5 * PI * wi, th.abs() > lim)
        })
        .collect();
    let vals: Result<Vec<f64>> = nodes
        .par_iter()
        .map(|&(th, _, _)| Ok(log_tau(pot, c + Complex64::from_polar(a, th), tol)?.log_abs))
        .collect();
    let vals = vals?;
    let integral: f64 = vals.iter().zip(&nodes).map(|(v, nd)| v * nd.1).sum();
    let m = n as f64 + 1.0;
    let rhs = background_constant(n) * a.powf(m) + m / (2.0 * PI) * integral;
    Ok(ContourCheck {
        a,
        lhs,
        rhs,
        scaled_gap: (lhs - rhs).abs() / a.powf(m),
        extrapolated: nodes.iter().any(|nd| nd.2),
    })
}

/// Least-squares fit `N(t) ≈ Ĉ t^{n+1}` on `[t_max/2, t_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub c_hat: f64,
    /// Same fit applied to `Ñ(t)`.
    pub c_hat_integrated: f64,
    pub a_n: f64,
    pub ratio: f64,
    pub t: Vec<f64>,
    /// `N(t) / (A_n t^{n+1})`.
    pub pointwise_ratio: Vec<f64>,
}

pub fn weyl_report(set: &ResonanceSet, r0: f64) -> Result<WeylReport> {
    let an = leading_constant(set, r0)?;
    let m = set.n as i32 + 1;
    let samples = 200;
    let t: Vec<f64> = (0..=samples)
        .map(|i| set.t_max * (0.5 + 0.5 * i as f64 / samples as f64))
        .collect();
    let (mut num, mut numi, mut den) = (0.0, 0.0, 0.0);
    let mut pointwise = Vec::with_capacity(t.len());
    for &ti in &t {
        let (nv, nt) = counting_function(set, ti)?;
        let p = ti.powi(m);
        num += nv as f64 * p;
        numi += nt * p;
        den += p * p;
        pointwise.push(nv as f64 / (an * p));
    }
    let c_hat = num / den;
    Ok(WeylReport {
        c_hat,
        c_hat_integrated: numi / den,
        a_n: an,
        ratio: c_hat / an,
        t,
        pointwise_ratio: pointwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Potential, PotentialConfig};
    use crate::resonance::all_resonances;

    fn empty(n: u32, t_max: f64) -> ResonanceSet {
        ResonanceSet {
            n,
            potential: PotentialConfig::Step { c: [0.0, 0.0], r0: 1.0 },
            t_max,
            resonances: Vec::new(),
            eigenvalues: Vec::new(),
            l_max_used: 0,
            certificate: Vec::new(),
            evaluations: 0,
            mismatches: 0,
        }
    }

    fn point(n: u32, z: Complex64, mult: u64) -> Resonance {
        Resonance {
            re: z.re,
            im: z.im,
            l: 0,
            k: 0.5 * (n as f64 - 1.0),
            zero_order: 1,
            mu: mult,
            total_multiplicity: mult,
            residual: 0.0,
            refined: true,
            cell: [0.0; 4],
        }
    }

    #[test]
    fn background_multiplicities() {
        assert_eq!(background_multiplicity(1, 7), 15);
        assert_eq!(background_multiplicity(3, 2), 10);
        assert!(background_set(2, 30.0).is_empty());
        let b = background_set(1, 3.6);
        assert_eq!(b, vec![(0.0, 1), (-1.0, 3), (-2.0, 5), (-3.0, 7)]);
    }

    #[test]
    fn background_count_grows_like_model_constant() {
        // N₀(t) = t² + O(t) for n = 1, N₀(t) ~ (2/4!) t⁴ for n = 3.
        for (n, t) in [(1u32, 400.3), (3, 200.3)] {
            let (c, _) = background_counting(n, t);
            let r = c as f64 / (background_constant(n) * t.powi(n as i32 + 1));
            assert!((r - 1.0).abs() < 5.0 / t, "n {n}: {r}");
        }
    }

    #[test]
    fn empty_set_counts_zero() {
        assert_eq!(counting_function(&empty(2, 10.0), 5.0).unwrap(), (0, 0.0));
        assert!(matches!(
            counting_function(&empty(2, 10.0), 11.0),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn integrated_count_is_exact() {
        let mut s = empty(1, 10.0);
        s.resonances.push(point(1, Complex64::new(-1.5, 0.0), 3));
        // Radius 2: Ñ(a) = 2·3·log(a/2).
        let (_, nt) = counting_function(&s, 7.0).unwrap();
        assert!((nt - 6.0 * (3.5f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn free_set_matches_background_count() {
        let pot = Potential::step(1, Complex64::new(0.0, 0.0), 1.0).unwrap();
        let set = all_resonances(&pot, 10.0, 1e-8).unwrap();
        for t in [1.0, 3.3, 6.9, 10.0] {
            let (nv, nt) = counting_function(&set, t).unwrap();
            let (n0, nt0) = background_counting(1, t);
            assert_eq!(nv, n0, "t {t}");
            assert!((nt - nt0).abs() < 1e-9 * (1.0 + nt0));
        }
    }

    #[test]
    fn sectors_partition_and_reflect() {
        let mut s = empty(2, 10.0);
        for (z, m) in [
            (Complex64::new(-2.0, 3.0), 2),
            (Complex64::new(-2.0, -3.0), 2),
            (Complex64::new(-4.0, 0.0), 5),
            (Complex64::new(1.0 - 3.0, 3.0), 1),
        ] {
            s.resonances.push(point(2, z, m));
        }
        let (full, _) = sector_count(&s, 10.0, 0.5 * PI, 1.5 * PI).unwrap();
        assert_eq!(full, counting_function(&s, 10.0).unwrap().0);
        let (a, _) = sector_count(&s, 10.0, 0.5 * PI, 0.75 * PI).unwrap();
        let (b, _) = sector_count(&s, 10.0, 0.75 * PI, 1.5 * PI).unwrap();
        assert_eq!(a + b, full);
        let (l, _) = sector_count(&s, 10.0, 0.5 * PI, PI).unwrap();
        let (r, _) = sector_count(&s, 10.0, PI, 1.5 * PI).unwrap();
        assert_eq!(l + r, full);
    }

    #[test]
    fn prediction_reduces_to_weyl_constant() {
        let (n, r0, t) = (2, 1.0, 10.0);
        let (_, an) = weyl_constant(n, r0).unwrap();
        let p = sector_prediction(n, r0, 0.5 * PI, 1.5 * PI, t).unwrap();
        assert!((p / (an * t.powi(3)) - 1.0).abs() < 1e-7, "{p}");
        let d = 0.3;
        let left = sector_prediction(n, r0, 0.5 * PI + d, PI - d, t).unwrap();
        let right = sector_prediction(n, r0, PI + d, 1.5 * PI - d, t).unwrap();
        assert!((left - right).abs() < 1e-6 * left.abs());
        assert!(matches!(
            sector_prediction(n, r0, PI, 1.2 * PI, t),
            Err(Error::NonDifferentiableAngle(_))
        ));
    }

    #[test]
    fn snapped_radii_avoid_half_integers() {
        for a in [15.0, 30.0, 7.77, 0.9, 12.49] {
            let s = snap_radius(a);
            let d = (2.0 * s - (2.0 * s).round()).abs() / 2.0;
            assert!((d - 0.23).abs() < 1e-12 || (d - 0.27).abs() < 1e-12, "{a} -> {s}");
            assert!((s - a).abs() <= 0.5);
        }
    }

    #[test]
    fn free_contour_identity_is_exact() {
        let pot = Potential::step(1, Complex64::new(0.0, 0.0), 1.0).unwrap();
        let set = all_resonances(&pot, 12.0, 1e-8).unwrap();
        let cc = contour_check(&pot, &set, 10.0, 1e-12).unwrap();
        let (_, nt0) = background_counting(1, cc.a);
        assert!((cc.lhs - nt0).abs() < 1e-9);
        assert!((cc.rhs - cc.a * cc.a).abs() < 1e-9);
    }

    #[test]
    fn csv_shape() {
        let pot = Potential::step(1, Complex64::new(0.0, 0.0), 1.0).unwrap();
        let set = all_resonances(&pot, 5.0, 1e-8).unwrap();
        let tab = CountingTable::compute(&set, 1.0, 10).unwrap();
        let csv = tab.to_csv();
        assert!(csv.starts_with("t,N,N0,N_tilde,weyl_pred\n"));
        assert_eq!(csv.lines().count(), 11);
        assert!(tab.n_count.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(tab.n_count, tab.n0);
    }
}
