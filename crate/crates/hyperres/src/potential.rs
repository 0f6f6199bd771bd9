//! Radial potentials supported in a ball `B(r0)` and their config schema.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Radial profile `V(r)` on `[0, r0]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `V = c` on `[0, r0]`.
    Step { c: Complex64 },
    /// `V = κ (r0 - r)^β` on `[0, r0]`.
    Power { kappa: Complex64, beta: f64 },
    /// Piecewise-linear interpolation of samples on an ascending grid
    /// covering `[0, r0]`, with a declared vanishing exponent.
    Sampled {
        r: Vec<f64>,
        v: Vec<Complex64>,
        sigma: f64,
    },
}

/// `Δ + V` on `H^{n+1}` with `V` radial and supported in `[0, r0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub n: u32,
    pub r0: f64,
    pub profile: Profile,
}

/// JSON form of a potential (dimension supplied separately).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialConfig {
    Step {
        c: [f64; 2],
        r0: f64,
    },
    Power {
        kappa: [f64; 2],
        beta: f64,
        r0: f64,
    },
    Sampled {
        r: Vec<f64>,
        v: Vec<[f64; 2]>,
        sigma: f64,
        r0: f64,
    },
}

fn cx(a: [f64; 2]) -> Complex64 {
    Complex64::new(a[0], a[1])
}

fn arr(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Potential {
    pub fn step(n: u32, c: Complex64, r0: f64) -> Result<Potential> {
        Potential::new(n, r0, Profile::Step { c })
    }

    pub fn new(n: u32, r0: f64, profile: Profile) -> Result<Potential> {
        let p = Potential { n, r0, profile };
        p.validate()?;
        Ok(p)
    }

    pub fn from_config(n: u32, cfg: &PotentialConfig) -> Result<Potential> {
        let (r0, profile) = match cfg {
            PotentialConfig::Step { c, r0 } => (*r0, Profile::Step { c: cx(*c) }),
            PotentialConfig::Power { kappa, beta, r0 } => (
                *r0,
                Profile::Power {
                    kappa: cx(*kappa),
                    beta: *beta,
                },
            ),
            PotentialConfig::Sampled { r, v, sigma, r0 } => (
                *r0,
                Profile::Sampled {
                    r: r.clone(),
                    v: v.iter().copied().map(cx).collect(),
                    sigma: *sigma,
                },
            ),
        };
        Potential::new(n, r0, profile)
    }

    pub fn to_config(&self) -> PotentialConfig {
        match &self.profile {
            Profile::Step { c } => PotentialConfig::Step { c: arr(*c), r0: self.r0 },
            Profile::Power { kappa, beta } => PotentialConfig::Power {
                kappa: arr(*kappa),
                beta: *beta,
                r0: self.r0,
            },
            Profile::Sampled { r, v, sigma } => PotentialConfig::Sampled {
                r: r.clone(),
                v: v.iter().copied().map(arr).collect(),
                sigma: *sigma,
                r0: self.r0,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if self.n < 1 {
            return bad("dimension n must be at least 1");
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return bad("support radius r0 must be positive");
        }
        match &self.profile {
            Profile::Step { c } => {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return bad("step amplitude must be finite");
                }
            }
            Profile::Power { kappa, beta } => {
                if kappa.norm() == 0.0 || !(kappa.re.is_finite() && kappa.im.is_finite()) {
                    return bad("power profile needs a finite nonzero kappa");
                }
                if !(*beta >= 0.0 && beta.is_finite()) {
                    return bad("power exponent beta must be nonnegative");
                }
            }
            Profile::Sampled { r, v, sigma } => {
                if r.len() < 2 || r.len() != v.len() {
                    return bad("sampled profile needs matching r and v arrays of length >= 2");
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("sampled grid must be strictly ascending");
                }
                if r[0] > 0.0 || (r[r.len() - 1] - self.r0).abs() > 1e-12 {
                    return bad("sampled grid must span [0, r0]");
                }
                if !(*sigma >= 1.0) {
                    return bad("sampled profile needs sigma >= 1");
                }
            }
        }
        Ok(())
    }

    /// `V(r)`, zero outside `[0, r0]`.
    pub fn value(&self, r: f64) -> Complex64 {
        if r > self.r0 || r < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.profile {
            Profile::Step { c } => *c,
            Profile::Power { kappa, beta } => {
                if *beta == 0.0 {
                    *kappa
                } else {
                    kappa * (self.r0 - r).powf(*beta)
                }
            }
            Profile::Sampled { r: rs, v, .. } => {
                let i = rs.partition_point(|&x| x <= r).clamp(1, rs.len() - 1);
                let t = (r - rs[i - 1]) / (rs[i] - rs[i - 1]);
                v[i - 1] * (1.0 - t) + v[i] * t
            }
        }
    }

    /// `sup |V|` over the support.
    pub fn sup_abs(&self) -> f64 {
        match &self.profile {
            Profile::Step { c } => c.norm(),
            Profile::Power { kappa, beta } => kappa.norm() * self.r0.powf(*beta),
            Profile::Sampled { v, .. } => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// Laplace exponent `σ = β + 1` of the behaviour at the support edge.
    pub fn sigma(&self) -> f64 {
        match &self.profile {
            Profile::Step { .. } => 1.0,
            Profile::Power { beta, .. } => beta + 1.0,
            Profile::Sampled { sigma, .. } => *sigma,
        }
    }

    /// Step amplitude when the profile is a constant.
    pub fn step_amplitude(&self) -> Option<Complex64> {
        match &self.profile {
            Profile::Step { c } => Some(*c),
            Profile::Power { kappa, beta } if *beta == 0.0 => Some(*kappa),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.step_amplitude(), Some(c) if c.norm() == 0.0)
    }

    /// True when `V` is real-valued (conjugation-symmetric resonance set).
    pub fn is_real(&self) -> bool {
        match &self.profile {
            Profile::Step { c } => c.im == 0.0,
            Profile::Power { kappa, .. } => kappa.im == 0.0,
            Profile::Sampled { v, .. } => v.iter().all(|z| z.im == 0.0),
        }
    }

    /// Radius below which `V` is exactly constant (0 if nowhere).
    pub fn constant_core(&self) -> f64 {
        match &self.profile {
            Profile::Step { .. } => self.r0,
            Profile::Power { beta, .. } if *beta == 0.0 => self.r0,
            Profile::Power { .. } => 0.0,
            Profile::Sampled { r, v, .. } => {
                let mut i = 1;
                while i < v.len() && v[i] == v[0] {
                    i += 1;
                }
                r[i - 1]
            }
        }
    }

    /// Matching radius for the ODE path: where `V` is constant if that
    /// region is substantial, otherwise a small fraction of `r0`.
    pub fn matching_radius(&self) -> f64 {
        let core = self.constant_core();
        if core >= 0.1 * self.r0 {
            (0.1 * self.r0).max(1e-3)
        } else {
            (1e-3 * self.r0).max(core)
        }
    }

    /// Parse `step:c=1,r0=1`, `power:kappa=2,beta=1,r0=1`, or a JSON object.
    pub fn parse_inline(n: u32, s: &str) -> Result<Potential> {
        let s = s.trim();
        if s.starts_with('{') {
            return Err(Error::InvalidInput("JSON potentials are parsed by the caller".into()));
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("expected kind:key=value,..., got {s:?}")))?;
        let mut c = None;
        let mut kappa = None;
        let mut beta = None;
        let mut r0 = None;
        for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got {kv:?}")))?;
            match k.trim() {
                "c" => c = Some(parse_complex(v)?),
                "kappa" => kappa = Some(parse_complex(v)?),
                "beta" => beta = Some(parse_real(v)?),
                "r0" => r0 = Some(parse_real(v)?),
                other => return Err(Error::InvalidInput(format!("unknown key {other:?}"))),
            }
        }
        let r0 = r0.ok_or_else(|| Error::InvalidInput("missing r0".into()))?;
        match kind.trim() {
            "step" => {
                let c = c.ok_or_else(|| Error::InvalidInput("missing c".into()))?;
                Potential::step(n, c, r0)
            }
            "power" => {
                let kappa = kappa.ok_or_else(|| Error::InvalidInput("missing kappa".into()))?;
                let beta = beta.ok_or_else(|| Error::InvalidInput("missing beta".into()))?;
                Potential::new(n, r0, Profile::Power { kappa, beta })
            }
            other => Err(Error::InvalidInput(format!("unknown inline potential kind {other:?}"))),
        }
    }
}

fn parse_real(v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("not a number: {v:?}")))
}

/// Parse `1`, `-2.5`, `i`, `-i`, `3i`, `1+2i`, `0.5-1e-3i`.
pub fn parse_complex(v: &str) -> Result<Complex64> {
    let t: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::InvalidInput(format!("not a complex number: {v:?}"));
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(t.parse().map_err(|_| err())?, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| err()),
        }
    };
    match split {
        Some(i) => Ok(Complex64::new(
            body[..i].parse().map_err(|_| err())?,
            imag(&body[i..])?,
        )),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}
