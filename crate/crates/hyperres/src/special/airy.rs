//! Airy function `Ai` on the whole complex plane.
//!
//! Small arguments use the Maclaurin series, large arguments the asymptotic
//! series (with the connection formula near the negative axis), and the
//! region in between is reached by Taylor stepping of `Ai'' = z Ai` in the
//! direction in which `Ai` is not recessive.

use num_complex::Complex64;
use std::f64::consts::PI;

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;
const R_SERIES: f64 = 2.0;
const R_ASYM: f64 = 9.0;

/// `(Ai(z), Ai'(z))` from the Maclaurin series.
fn maclaurin(z: Complex64) -> (Complex64, Complex64) {
    // f = Σ a_k, g = Σ b_k with a_0 = 1, b_0 = z.
    let z3 = z * z * z;
    let mut a = Complex64::new(1.0, 0.0);
    let mut b = z;
    let (mut f, mut g) = (a, b);
    let (mut fp, mut gp) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    for k in 1..200 {
        let kf = k as f64;
        a *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        b *= z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += a;
        g += b;
        // d/dz of z^{3k}, z^{3k+1}
        fp += a * (3.0 * kf) / z;
        gp += b * (3.0 * kf + 1.0) / z;
        if a.norm() + b.norm() < 1e-17 * (f.norm() + g.norm()) {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// `(Ai(z), Ai'(z))` from the asymptotic series, `|arg z| ≤ 2π/3`, `|z|` large.
fn asymptotic(z: Complex64) -> (Complex64, Complex64) {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    let mut u = 1.0;
    let mut su = Complex64::new(1.0, 0.0);
    let mut sv = Complex64::new(1.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    let inv = -zeta.inv();
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -u * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
        p *= inv;
        let tu = p * u;
        let tv = p * v;
        if tu.norm() > last {
            break;
        }
        last = tu.norm();
        su += tu;
        sv += tv;
        if last < 1e-17 {
            break;
        }
    }
    let e = (-zeta).exp();
    let z14 = z.powf(0.25);
    let ai = e / (2.0 * PI.sqrt() * z14) * su;
    let aip = -e * z14 / (2.0 * PI.sqrt()) * sv;
    (ai, aip)
}

/// Taylor stepping for `y'' = z y` from `z0` to `z1` along the segment.
fn taylor_walk(z0: Complex64, y: Complex64, dy: Complex64, z1: Complex64) -> (Complex64, Complex64) {
    let (mut zc, mut y, mut dy) = (z0, y, dy);
    loop {
        let rem = z1 - zc;
        if rem.norm() == 0.0 {
            break;
        }
        let hmax = 2.0 / (zc.norm().sqrt() + 1.0);
        let h = if rem.norm() <= hmax { rem } else { rem * (hmax / rem.norm()) };
        // b_j = a_j h^j, a_{j+2} = (zc a_j + a_{j-1}) / ((j+2)(j+1))
        let mut b = vec![y, dy * h];
        let (mut s, mut ds) = (y + dy * h, dy * h);
        let h2 = h * h;
        let h3 = h2 * h;
        let mut j = 0usize;
        loop {
            let prev = if j >= 1 { b[j - 1] } else { Complex64::new(0.0, 0.0) };
            let next = (zc * h2 * b[j] + h3 * prev) / (((j + 2) * (j + 1)) as f64);
            b.push(next);
            s += next;
            ds += next * ((j + 2) as f64);
            j += 1;
            let tail = b[j + 1].norm() + b[j].norm();
            if j > 4 && tail < 1e-18 * (s.norm() + ds.norm()) {
                break;
            }
            if j > 400 {
                break;
            }
        }
        y = s;
        dy = ds / h;
        zc += h;
        if (z1 - zc).norm() < 1e-14 * (1.0 + z1.norm()) {
            break;
        }
    }
    (y, dy)
}

/// `(Ai(z), Ai'(z))`.
pub fn airy_ai_deriv(z: Complex64) -> (Complex64, Complex64) {
    let r = z.norm();
    if r <= R_SERIES {
        return maclaurin(z);
    }
    let th = z.arg().abs();
    if r >= R_ASYM {
        if th <= 2.0 * PI / 3.0 {
            return asymptotic(z);
        }
        // Ai(z) = -ω Ai(ωz) - ω² Ai(ω² z), ω = e^{2πi/3}.
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let w2 = w * w;
        let (a1, d1) = asymptotic(w * z);
        let (a2, d2) = asymptotic(w2 * z);
        return (-w * a1 - w2 * a2, -w * w * d1 - w2 * w2 * d2);
    }
    if th <= PI / 3.0 {
        // Recessive sector: walk inward from the asymptotic region.
        let zf = z * (R_ASYM / r);
        let (a, d) = asymptotic(zf);
        taylor_walk(zf, a, d, z)
    } else {
        // Ai is dominant or oscillatory here: walk outward from the origin.
        let z0 = z * (R_SERIES / r);
        let (a, d) = maclaurin(z0);
        taylor_walk(z0, a, d, z)
    }
}

/// `Ai(w)` for any complex `w`.
pub fn airy_ai(w: Complex64) -> Complex64 {
    airy_ai_deriv(w).0
}

/// Leading asymptotic form `w^{-1/4} exp(-2/3 w^{3/2}) / (2√π)`.
pub fn airy_ai_leading(w: Complex64) -> Complex64 {
    (-(w.powf(1.5) * (2.0 / 3.0))).exp() / (2.0 * PI.sqrt() * w.powf(0.25))
}
