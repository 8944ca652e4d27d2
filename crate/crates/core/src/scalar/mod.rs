//! Scalar functions of the spectral parameter: the semicircle and
//! Kesten–McKay Stieltjes transforms, the Kesten–McKay density and its
//! quantiles, truncated-tree root functions, finite-`N` corrections, and the
//! parameter / error schedule.

mod params;
pub mod quad;
mod tree_fns;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use params::{error_params, error_params_log, select_ell, ErrorParams, ParameterSet, Schedule};
pub use tree_fns::{delta_m, delta_q, x_ell, y_ell};

/// A point `z = E + iη` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParam {
    z: C64,
}

impl SpectralParam {
    pub fn new(e: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !e.is_finite() || !eta.is_finite() {
            return Err(Error::NotUpperHalfPlane(format!("{e}+{eta}i")));
        }
        Ok(SpectralParam { z: C64::new(e, eta) })
    }

    pub fn from_complex(z: C64) -> Result<Self> {
        SpectralParam::new(z.re, z.im)
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn e(&self) -> f64 {
        self.z.re
    }

    pub fn eta(&self) -> f64 {
        self.z.im
    }

    /// Distance from `E` to the nearest spectral edge `±2`.
    pub fn kappa(&self) -> f64 {
        kappa(self.z.re)
    }
}

pub fn kappa(e: f64) -> f64 {
    (e - 2.0).abs().min((e + 2.0).abs())
}

impl From<SpectralParam> for C64 {
    fn from(p: SpectralParam) -> C64 {
        p.z
    }
}

impl fmt::Display for SpectralParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.z.re, self.z.im)
    }
}

/// Parses `a+bi`, `a-bi` is rejected (not in the upper half-plane). Also
/// accepts a bare `bi`.
impl FromStr for SpectralParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse {s:?} as a+bi"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = t.strip_suffix('i').ok_or_else(bad)?;
        // split at the last sign that is not a leading sign or an exponent sign
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = match im {
            "+" | "" => 1.0,
            "-" => -1.0,
            x => x.parse().map_err(|_| bad())?,
        };
        if !(im > 0.0) {
            return Err(Error::NotUpperHalfPlane(s.to_string()));
        }
        SpectralParam::new(re, im)
    }
}

/// Stieltjes transform of the semicircle law: the root of `m² + zm + 1 = 0`
/// with `|m| ≤ 1`, ties on `|m| = 1` going to `Im m ≥ 0`. Also defined on
/// the real axis, where it is the boundary value from above.
pub fn m_sc(z: impl Into<C64>) -> C64 {
    let z = z.into();
    let s = (z * z - 4.0).sqrt();
    // the larger root is computed without cancellation; the other is its inverse
    let a = (-z + s) * 0.5;
    let b = (-z - s) * 0.5;
    let big = if a.norm() >= b.norm() { a } else { b };
    let small = 1.0 / big;
    let (nb, ns) = (big.norm(), small.norm());
    if (nb - ns).abs() <= 1e-14 * nb {
        if small.im >= big.im {
            small
        } else {
            big
        }
    } else {
        small
    }
}

/// Stieltjes transform of the Kesten–McKay law.
pub fn m_d(z: impl Into<C64>, d: usize) -> C64 {
    let z = z.into();
    let m = m_sc(z);
    let dd = d as f64;
    1.0 / (-z - dd / (dd - 1.0) * m)
}

/// Kesten–McKay density of `H = A/√(d-1)`.
pub fn rho_d(x: f64, d: usize) -> f64 {
    let dd = d as f64;
    let s = 4.0 - x * x;
    if s <= 0.0 {
        return 0.0;
    }
    s.sqrt() / (2.0 * std::f64::consts::PI * (1.0 + 1.0 / (dd - 1.0) - x * x / dd))
}

/// `ρ_d(2cosθ)·2sinθ`: the density after the substitution `x = 2cosθ`.
fn rho_theta(theta: f64, d: usize) -> f64 {
    let dd = d as f64;
    let (s, c) = theta.sin_cos();
    2.0 * s * s / (std::f64::consts::PI * (1.0 + 1.0 / (dd - 1.0) - 4.0 * c * c / dd))
}

const QUAD_TOL: f64 = 1e-14;

/// `∫_x^2 ρ_d`.
pub fn km_tail(x: f64, d: usize) -> f64 {
    if x >= 2.0 {
        return 0.0;
    }
    if x <= -2.0 {
        return 1.0;
    }
    quad::integrate(|t| rho_theta(t, d), 0.0, (x / 2.0).acos(), QUAD_TOL)
}

/// Kesten–McKay distribution function `∫_{-2}^x ρ_d`.
pub fn km_cdf(x: f64, d: usize) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    quad::integrate(|t| rho_theta(t, d), (x / 2.0).acos(), std::f64::consts::PI, QUAD_TOL)
}

/// `∫ ρ_d(x)/(x - z) dx` by quadrature; an independent check of [`m_d`].
pub fn km_stieltjes_quad(z: impl Into<C64>, d: usize, tol: f64) -> C64 {
    let z = z.into();
    quad::integrate_complex(
        |t| rho_theta(t, d) / (2.0 * t.cos() - z),
        0.0,
        std::f64::consts::PI,
        tol,
    )
}

/// Classical locations: `γ_i` solves `∫_{γ_i}^2 ρ_d = i/N`; returns
/// `γ_2, …, γ_N` (descending), with `γ_N = -2`.
pub fn classical_locations(n: usize, d: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameters("classical locations need n ≥ 2".into()));
    }
    // Bisection in θ (x = 2cosθ), where the tail is an increasing integral
    // from 0. The anchor (θ_a, tail(θ_a)) only moves forward, so each step
    // integrates over a short interval.
    let mut out = Vec::with_capacity(n - 1);
    let (mut theta_a, mut tail_a) = (0.0f64, 0.0f64);
    for i in 2..n {
        let target = i as f64 / n as f64;
        let mut hi = std::f64::consts::PI;
        while hi - theta_a > 1e-13 {
            let mid = 0.5 * (theta_a + hi);
            let t = tail_a + quad::integrate(|t| rho_theta(t, d), theta_a, mid, 1e-15);
            if t < target {
                theta_a = mid;
                tail_a = t;
            } else {
                hi = mid;
            }
        }
        out.push(2.0 * (0.5 * (theta_a + hi)).cos());
    }
    out.push(-2.0);
    Ok(out)
}
