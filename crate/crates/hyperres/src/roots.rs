//! Zeros of analytic functions in rectangles: argument-principle winding by
//! continuous phase tracking, recursive subdivision and Muller refinement.
//!
//! Functions are supplied in [`Scaled`] form so that only phases and ratios
//! are ever formed.

use crate::error::{Error, Result};
use crate::scaled::Scaled;
use num_complex::Complex64;
use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Axis-aligned rectangle `[lo.re, hi.re] × [lo.im, hi.im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Rect {
        Rect {
            lo: Complex64::new(x0.min(x1), y0.min(y1)),
            hi: Complex64::new(x0.max(x1), y0.max(y1)),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn center(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }

    /// Corners in counter-clockwise order starting at `lo`.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }

    pub fn dilate(&self, d: f64) -> Rect {
        let e = Complex64::new(d, d);
        Rect {
            lo: self.lo - e,
            hi: self.hi + e,
        }
    }
}

/// A located zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub z: Complex64,
    /// Order from the winding number of the isolating box.
    pub order: u32,
    /// `|f(z)|` relative to `max |f|` on a radius-0.01 cross around `z`.
    pub residual: f64,
    pub refined: bool,
    /// Isolating box.
    pub cell: Rect,
}

/// Largest accepted phase step between neighbouring boundary samples.
const MAX_PHASE_STEP: f64 = PI / 3.0;
/// Largest accepted change of `log|f|` between neighbouring samples.
const MAX_LOG_STEP: f64 = 4.0;
/// Initial boundary sample spacing.
const SPACING: f64 = 0.25;
/// Split fraction for subdivision (off-centre to avoid symmetric placements).
const SPLIT: f64 = 0.4615;

/// Phase tracker with a memo of function values.
pub struct Tracker<'a, F: Fn(Complex64) -> Result<Scaled>> {
    f: &'a F,
    cache: RefCell<HashMap<(u64, u64), Scaled>>,
    evaluations: Cell<usize>,
    /// Count of subdivisions whose child windings did not add up.
    pub mismatches: Cell<usize>,
}

impl<'a, F: Fn(Complex64) -> Result<Scaled>> Tracker<'a, F> {
    pub fn new(f: &'a F) -> Self {
        Tracker {
            f,
            cache: RefCell::new(HashMap::new()),
            evaluations: Cell::new(0),
            mismatches: Cell::new(0),
        }
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.get()
    }

    pub fn eval(&self, z: Complex64) -> Result<Scaled> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(*v);
        }
        self.evaluations.set(self.evaluations.get() + 1);
        let v = (self.f)(z)?;
        if !v.is_finite() {
            return Err(Error::PrecisionExhausted(f64::INFINITY));
        }
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// Continuous change of `arg f` along the segment `a → b`.
    pub fn segment(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let pieces = ((b - a).norm() / SPACING).ceil().max(1.0) as usize;
        let mut total = 0.0;
        let mut za = a;
        let mut fa = self.eval(a)?;
        for i in 1..=pieces {
            let zb = if i == pieces { b } else { a + (b - a) * (i as f64 / pieces as f64) };
            let fb = self.eval(zb)?;
            total += self.refine(za, zb, fa, fb, 0)?;
            za = zb;
            fa = fb;
        }
        Ok(total)
    }

    fn refine(&self, a: Complex64, b: Complex64, fa: Scaled, fb: Scaled, depth: u32) -> Result<f64> {
        if fa.is_zero() || fb.is_zero() {
            return Err(Error::BoundaryZero(if fa.is_zero() { a } else { b }));
        }
        let step = (fb / fa).arg();
        let m = (a + b) * 0.5;
        let fm = self.eval(m)?;
        if fm.is_zero() {
            return Err(Error::BoundaryZero(m));
        }
        let s1 = (fm / fa).arg();
        let s2 = (fb / fm).arg();
        let dlog = (fb.ln_abs() - fa.ln_abs()).abs();
        // Accept only when the halves are small and add up to the whole,
        // which rules out a full turn hidden between two samples.
        let consistent = (s1 + s2 - step).abs() < 1e-6;
        if consistent && s1.abs().max(s2.abs()) <= MAX_PHASE_STEP && dlog <= MAX_LOG_STEP {
            return Ok(s1 + s2);
        }
        if depth >= 48 || (b - a).norm() < 1e-12 * (1.0 + a.norm()) {
            if consistent && s1.abs().max(s2.abs()) < 0.5 * PI {
                return Ok(s1 + s2);
            }
            return Err(Error::BoundaryZero(m));
        }
        Ok(self.refine(a, m, fa, fm, depth + 1)? + self.refine(m, b, fm, fb, depth + 1)?)
    }

    /// Winding number of `f` around the rectangle boundary.
    pub fn winding(&self, r: &Rect) -> Result<i64> {
        let c = r.corners();
        let mut total = 0.0;
        for i in 0..4 {
            total += self.segment(c[i], c[(i + 1) % 4])?;
        }
        let w = total / (2.0 * PI);
        if (w - w.round()).abs() > 0.1 {
            return Err(Error::BoundaryZero(r.center()));
        }
        Ok(w.round() as i64)
    }

    /// Muller iteration from `z0`; `None` if it leaves `keep` or stalls.
    pub fn muller(&self, z0: Complex64, h: f64, keep: &Rect) -> Result<Option<Complex64>> {
        let mut z = [z0 - h, z0 + Complex64::new(0.0, h), z0];
        let mut f = [self.eval_raw(z[0])?, self.eval_raw(z[1])?, self.eval_raw(z[2])?];
        for _ in 0..80 {
            if f[2].is_zero() {
                return Ok(Some(z[2]));
            }
            let q0 = (f[0] / f[2]).to_complex();
            let q1 = (f[1] / f[2]).to_complex();
            let h1 = z[1] - z[0];
            let h2 = z[2] - z[1];
            let d1 = (q1 - q0) / h1;
            let d2 = (1.0 - q1) / h2;
            let a = (d2 - d1) / (h2 + h1);
            let b = a * h2 + d2;
            let disc = (b * b - 4.0 * a).sqrt();
            let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
            if den.norm() == 0.0 || !den.re.is_finite() || !den.im.is_finite() {
                return Ok(None);
            }
            let dz = -2.0 / den;
            let z3 = z[2] + dz;
            if !keep.contains(z3) {
                return Ok(None);
            }
            let f3 = self.eval_raw(z3)?;
            z = [z[1], z[2], z3];
            f = [f[1], f[2], f3];
            if dz.norm() <= 1e-14 * z3.norm().max(1.0) {
                return Ok(Some(z3));
            }
        }
        Ok(None)
    }

    /// True when a small square around `z` has winding number one.
    fn isolates(&self, z: Complex64, size: f64) -> bool {
        let d = (1e-4 * size).max(1e-9 * z.norm().max(1.0));
        let t = Tracker::new(self.f);
        let ok = matches!(t.winding(&Rect::new(z.re - d, z.re + d, z.im - d, z.im + d)), Ok(1));
        self.evaluations.set(self.evaluations.get() + t.evaluations());
        ok
    }

    fn eval_raw(&self, z: Complex64) -> Result<Scaled> {
        self.evaluations.set(self.evaluations.get() + 1);
        (self.f)(z)
    }

    /// `|f(z)|` relative to the largest `|f|` on a small cross around `z`.
    pub fn residual(&self, z: Complex64) -> Result<f64> {
        let fz = self.eval_raw(z)?;
        if fz.is_zero() {
            return Ok(0.0);
        }
        let mut m = f64::NEG_INFINITY;
        for d in [1.0, -1.0] {
            for u in [Complex64::new(0.01 * d, 0.0), Complex64::new(0.0, 0.01 * d)] {
                m = m.max(self.eval_raw(z + u)?.ln_abs());
            }
        }
        Ok((fz.ln_abs() - m).exp())
    }

    /// All zeros in `r`, given its winding number.
    pub fn zeros(&self, r: &Rect, winding: i64) -> Result<Vec<Zero>> {
        let mut out = Vec::new();
        self.locate(r, winding, 0, &mut out)?;
        Ok(out)
    }

    fn locate(&self, r: &Rect, wn: i64, depth: u32, out: &mut Vec<Zero>) -> Result<()> {
        if wn <= 0 {
            return Ok(());
        }
        let size = r.width().max(r.height());
        if wn == 1 && size <= 1.5 {
            let keep = r.dilate(1e-9 * size.max(1.0));
            if let Some(z) = self.muller(r.center(), 0.1 * size, &keep)?.filter(|z| self.isolates(*z, size)) {
                out.push(Zero {
                    z,
                    order: 1,
                    residual: self.residual(z)?,
                    refined: true,
                    cell: *r,
                });
                return Ok(());
            }
        }
        if size < 1e-7 || depth > 60 {
            // Multiple zero or a cluster below resolution.
            let z = self.muller(r.center(), 0.5 * size, &r.dilate(size))?;
            let (z, refined) = match z {
                Some(z) => (z, true),
                None => (r.center(), false),
            };
            out.push(Zero {
                z,
                order: wn as u32,
                residual: self.residual(z)?,
                refined,
                cell: *r,
            });
            return Ok(());
        }
        let xm = r.lo.re + SPLIT * r.width();
        let ym = r.lo.im + SPLIT * r.height();
        let kids = [
            Rect::new(r.lo.re, xm, r.lo.im, ym),
            Rect::new(xm, r.hi.re, r.lo.im, ym),
            Rect::new(xm, r.hi.re, ym, r.hi.im),
            Rect::new(r.lo.re, xm, ym, r.hi.im),
        ];
        let mut ws = [0i64; 4];
        for (i, k) in kids.iter().enumerate() {
            ws[i] = self.winding(k)?;
        }
        if ws.iter().sum::<i64>() != wn {
            self.mismatches.set(self.mismatches.get() + 1);
        }
        for (k, w) in kids.iter().zip(ws) {
            self.locate(k, w, depth + 1, out)?;
        }
        Ok(())
    }
}

/// Number of zeros of `f` inside `r`, counted with order; a suspected
/// boundary zero triggers one retry on the box dilated by `1e-3`.
pub fn winding_count<F: Fn(Complex64) -> Result<Scaled>>(f: &F, r: &Rect) -> Result<i64> {
    let t = Tracker::new(f);
    match t.winding(r) {
        Err(Error::BoundaryZero(_)) => t.winding(&r.dilate(1e-3)),
        other => other,
    }
}

/// All zeros of `f` in `r` with their orders.
pub fn find_zeros<F: Fn(Complex64) -> Result<Scaled>>(f: &F, r: &Rect) -> Result<Vec<Zero>> {
    let t = Tracker::new(f);
    let w = t.winding(r)?;
    t.zeros(r, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(roots: Vec<Complex64>) -> impl Fn(Complex64) -> Result<Scaled> {
        move |z| Ok(Scaled::new(roots.iter().fold(Complex64::new(1.0, 0.0), |p, r| p * (z - r))))
    }

    #[test]
    fn cube_has_three_zeros() {
        let f = |z: Complex64| Ok(Scaled::new(z * z * z));
        assert_eq!(winding_count(&f, &Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap(), 3);
        let zs = find_zeros(&f, &Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        assert_eq!(zs.len(), 1);
        assert_eq!(zs[0].order, 3);
        assert!(zs[0].z.norm() < 1e-4);
    }

    #[test]
    fn exponential_has_none() {
        let f = |z: Complex64| Ok(Scaled::from_log(z));
        assert_eq!(winding_count(&f, &Rect::new(-3.0, 3.0, -20.0, 20.0)).unwrap(), 0);
    }

    #[test]
    fn boundary_zero_is_reported_or_dilated() {
        let f = |z: Complex64| Ok(Scaled::new(z - 1.0));
        let r = Rect::new(-1.0, 1.0, -1.0, 1.0);
        assert!(matches!(Tracker::new(&f).winding(&r), Err(Error::BoundaryZero(_))));
        assert_eq!(winding_count(&f, &r).unwrap(), 1);
    }

    #[test]
    fn scaled_values_beyond_double_range() {
        // |f| near e^{900}, beyond f64, with a moderate phase rate.
        let f = |z: Complex64| Ok(Scaled::from_log(Complex64::new(900.0, 4.0) + 12.0 * z) * (z - Complex64::new(0.0, 0.3)));
        let zs = find_zeros(&f, &Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        assert_eq!(zs.len(), 1);
        assert!((zs[0].z - Complex64::new(0.0, 0.3)).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn degree_seven_polynomial(seed in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 7)) {
            let roots: Vec<Complex64> = seed.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let f = poly(roots.clone());
            let r = Rect::new(-1.77, 1.63, -1.71, 1.59);
            let want = roots.iter().filter(|z| r.contains(**z)).count() as i64;
            prop_assert_eq!(winding_count(&f, &r).unwrap(), want);
            let zs = find_zeros(&f, &r).unwrap();
            prop_assert_eq!(zs.iter().map(|z| z.order as i64).sum::<i64>(), want);
            for z in zs.iter().filter(|z| z.order == 1) {
                prop_assert!(roots.iter().any(|r| (r - z.z).norm() < 1e-8));
            }
        }
    }
}
