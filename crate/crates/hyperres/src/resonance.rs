//! Resonances as zeros of the per-mode connection coefficients in
//! `{|s - n/2| ≤ t_max, Re s < n/2}`, found cell by cell with the argument
//! principle on a grid whose lines sit at `m/2 + 0.23`.

use crate::error::{Error, Result};
use crate::mode::{multiplicity, order, zero_function};
use crate::phase::rho_min;
use crate::potential::{Potential, PotentialConfig};
use crate::roots::{Rect, Tracker};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Offset of every scan line from the half-integer lattice.
pub const GRID_OFFSET: f64 = 0.23;

/// A zero of the mode-`l` coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub re: f64,
    pub im: f64,
    pub l: u32,
    pub k: f64,
    pub zero_order: u32,
    pub mu: u64,
    pub total_multiplicity: u64,
    pub residual: f64,
    pub refined: bool,
    /// Isolating box `[x0, x1, y0, y1]`.
    pub cell: [f64; 4],
}

impl Resonance {
    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Scan settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Residual threshold above which a zero is flagged unrefined.
    pub tol: f64,
    /// Extra modes past the predicted cutoff that must be empty.
    pub margin: u32,
    /// Largest accepted `t_max`.
    pub t_ceiling: f64,
    /// Largest mode reached by escalation.
    pub l_ceiling: u32,
    /// Coarse cell width (a multiple of 1/2).
    pub cell: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            tol: 1e-8,
            margin: 5,
            t_ceiling: 60.0,
            l_ceiling: 400,
            cell: 5.0,
        }
    }
}

/// Outcome of scanning one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeScan {
    pub l: u32,
    pub resonances: Vec<Resonance>,
    /// Zeros with `Re s ≥ n/2`.
    pub eigenvalues: Vec<Resonance>,
    pub evaluations: usize,
    /// Subdivisions whose child windings did not add up to the parent.
    pub mismatches: usize,
}

/// Per-mode statement that the mode had no zero in the disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeCertificate {
    pub l: u32,
    pub zeros_in_disk: u64,
}

/// All resonances in the half disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub n: u32,
    pub potential: PotentialConfig,
    pub t_max: f64,
    pub resonances: Vec<Resonance>,
    pub eigenvalues: Vec<Resonance>,
    pub l_max_used: u32,
    pub certificate: Vec<ModeCertificate>,
    pub evaluations: usize,
    pub mismatches: usize,
}

fn grid_lines(lo: f64, hi: f64, anchor: f64, step: f64) -> Vec<f64> {
    // Lines anchor + j·step covering [lo, hi].
    let j0 = ((lo - anchor) / step).floor() as i64;
    let j1 = ((hi - anchor) / step).ceil() as i64;
    (j0..=j1).map(|j| anchor + j as f64 * step).collect()
}

fn rect_distance(r: &Rect, c: Complex64) -> f64 {
    let dx = (r.lo.re - c.re).max(0.0).max(c.re - r.hi.re);
    let dy = (r.lo.im - c.im).max(0.0).max(c.im - r.hi.im);
    dx.hypot(dy)
}

fn to_resonance(n: u32, l: u32, z: &crate::roots::Zero, tol: f64) -> Resonance {
    let mu = multiplicity(n, l);
    Resonance {
        re: z.z.re,
        im: z.z.im,
        l,
        k: order(n, l),
        zero_order: z.order,
        mu,
        total_multiplicity: z.order as u64 * mu,
        residual: z.residual,
        refined: z.refined && z.residual <= tol,
        cell: [z.cell.lo.re, z.cell.hi.re, z.cell.lo.im, z.cell.hi.im],
    }
}

/// Cells of the scan grid meeting the disk `|s - n/2| ≤ t_max`, left of
/// `Re s = n/2 + 0.23`.
pub fn scan_cells(n: u32, t_max: f64, cell: f64) -> Vec<Rect> {
    let c = Complex64::new(0.5 * n as f64, 0.0);
    let right = c.re + GRID_OFFSET;
    let xs = grid_lines(c.re - t_max - cell, right, right, cell);
    let ys = grid_lines(-t_max - cell, t_max + cell, GRID_OFFSET, cell);
    let mut out = Vec::new();
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            let r = Rect::new(xs[i], xs[i + 1], ys[j], ys[j + 1]);
            if r.hi.re <= right + 1e-12 && rect_distance(&r, c) <= t_max {
                out.push(r);
            }
        }
    }
    out
}

/// Zeros of the mode-`l` coefficient in the half disk of radius `t_max`.
pub fn mode_resonances(pot: &Potential, l: u32, t_max: f64, tol: f64) -> Result<ModeScan> {
    mode_resonances_with(pot, l, t_max, &ScanConfig { tol, ..ScanConfig::default() })
}

pub fn mode_resonances_with(pot: &Potential, l: u32, t_max: f64, cfg: &ScanConfig) -> Result<ModeScan> {
    let n = pot.n;
    let centre = Complex64::new(0.5 * n as f64, 0.0);
    let f = |s: Complex64| zero_function(pot, l, s);
    let t = Tracker::new(&f);
    let mut zeros = Vec::new();
    for r in scan_cells(n, t_max, cfg.cell) {
        let w = t.winding(&r)?;
        if w != 0 {
            zeros.extend(t.zeros(&r, w)?);
        }
    }
    // Eigenvalue side: a box right of the scan grid sized by sup |V|.
    let e = pot.sup_abs().sqrt() + 1.0;
    let attractive = !(pot.is_real() && pot.step_amplitude().is_some_and(|c| c.re >= 0.0));
    if attractive && !pot.is_zero() {
        let x0 = centre.re + GRID_OFFSET;
        let r = Rect::new(x0, x0 + e.ceil(), -e.ceil() - GRID_OFFSET, e.ceil() + GRID_OFFSET);
        let w = t.winding(&r)?;
        if w != 0 {
            zeros.extend(t.zeros(&r, w)?);
        }
    }
    let mut res = Vec::new();
    let mut eig = Vec::new();
    for z in &zeros {
        let item = to_resonance(n, l, z, cfg.tol);
        if z.z.re >= centre.re {
            eig.push(item);
        } else if (z.z - centre).norm() <= t_max {
            res.push(item);
        }
    }
    // Imaginary parts quantised so rounding noise on the real axis does not
    // scramble the order.
    let key = |r: &Resonance| ((r.im * 1e8).round(), -r.re);
    res.sort_by(|a, b| key(a).partial_cmp(&key(b)).expect("finite"));
    eig.sort_by(|a, b| key(a).partial_cmp(&key(b)).expect("finite"));
    Ok(ModeScan {
        l,
        resonances: res,
        eigenvalues: eig,
        evaluations: t.evaluations(),
        mismatches: t.mismatches.get(),
    })
}

/// Predicted last mode with zeros in the disk: `k ≈ t_max / min ϱ`.
pub fn predicted_l_max(pot: &Potential, t_max: f64) -> Result<u32> {
    if pot.is_zero() {
        // Background zeros -l-m lie in the disk for l ≤ t_max - n/2.
        return Ok(t_max.ceil() as u32);
    }
    let k = t_max / rho_min(pot.r0)?;
    Ok((k - 0.5 * (pot.n as f64 - 1.0)).max(0.0).ceil() as u32)
}

/// Resonances of all modes, with a completeness certificate on the last
/// `margin` modes.
pub fn all_resonances(pot: &Potential, t_max: f64, tol: f64) -> Result<ResonanceSet> {
    all_resonances_with(pot, t_max, &ScanConfig { tol, ..ScanConfig::default() })
}

pub fn all_resonances_with(pot: &Potential, t_max: f64, cfg: &ScanConfig) -> Result<ResonanceSet> {
    if !(t_max > 0.0) || t_max > cfg.t_ceiling {
        return Err(Error::InvalidInput(format!(
            "t_max must lie in (0, {}], got {t_max}",
            cfg.t_ceiling
        )));
    }
    let n = pot.n;
    let mut set = ResonanceSet {
        n,
        potential: pot.to_config(),
        t_max,
        resonances: Vec::new(),
        eigenvalues: Vec::new(),
        l_max_used: 0,
        certificate: Vec::new(),
        evaluations: 0,
        mismatches: 0,
    };
    if pot.is_zero() && n % 2 == 0 {
        // No resonances for the free operator in odd dimension n+1.
        return Ok(set);
    }
    let mut l_max = predicted_l_max(pot, t_max)? + cfg.margin;
    let mut scans: Vec<ModeScan> = Vec::new();
    let mut next = 0u32;
    loop {
        let batch: Result<Vec<ModeScan>> = (next..=l_max)
            .into_par_iter()
            .map(|l| mode_resonances_with(pot, l, t_max, cfg))
            .collect();
        scans.extend(batch?);
        next = l_max + 1;
        let tail = &scans[scans.len() - cfg.margin as usize - 1..];
        if tail.iter().all(|m| m.resonances.is_empty()) {
            break;
        }
        if l_max + cfg.margin > cfg.l_ceiling {
            return Err(Error::CertificateFailure {
                l: l_max as usize,
                ceiling: cfg.l_ceiling as usize,
            });
        }
        l_max += cfg.margin;
    }
    scans.sort_by_key(|m| m.l);
    for m in &scans {
        set.resonances.extend(m.resonances.iter().copied());
        set.eigenvalues.extend(m.eigenvalues.iter().copied());
        set.evaluations += m.evaluations;
        set.mismatches += m.mismatches;
    }
    set.l_max_used = l_max;
    set.certificate = scans[scans.len() - cfg.margin as usize - 1..]
        .iter()
        .map(|m| ModeCertificate {
            l: m.l,
            zeros_in_disk: m.resonances.len() as u64,
        })
        .collect();
    Ok(set)
}

/// Seventeen significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResonanceSet {
    /// CSV with header `n,l,k,re_s,im_s,zero_order,mu,total_multiplicity,residual`.
    pub fn to_csv(&self) -> String {
        rows_csv(self.n, &self.resonances)
    }

    pub fn eigenvalues_csv(&self) -> String {
        rows_csv(self.n, &self.eigenvalues)
    }

    /// Total multiplicity.
    pub fn total(&self) -> u64 {
        self.resonances.iter().map(|r| r.total_multiplicity).sum()
    }
}

fn rows_csv(n: u32, rows: &[Resonance]) -> String {
    let mut s = String::from("n,l,k,re_s,im_s,zero_order,mu,total_multiplicity,residual\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            n,
            r.l,
            fmt17(r.k),
            fmt17(r.re),
            fmt17(r.im),
            r.zero_order,
            r.mu,
            r.total_multiplicity,
            fmt17(r.residual)
        ));
    }
    s
}
