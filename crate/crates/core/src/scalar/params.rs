//! The parameter schedule and the error parameters `ε₀, ε, ε′, φ`.
//!
//! Error parameters are evaluated in log space so that the asymptotic
//! relations can be checked at sizes like `log N ≈ 10⁵`, far beyond `f64`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{kappa, m_d, m_sc, SpectralParam};
use crate::error::{Error, Result};

/// Exponents of the schedule; desk-scale defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParameterSet {
    /// Exponent `𝔠 ∈ (0, 1)` of the tree-like radius and cycle budget.
    pub c: f64,
    /// `ℓ` window exponent.
    pub a: f64,
    /// Spectral-domain exponent: `η ≥ (log N)^𝔟 / N`.
    pub b: f64,
    /// `r = 𝔯 log_{d-1} N`, with `𝔯 ≤ 𝔠/32`.
    pub rr: f64,
    /// Excess cap of tree-like neighborhoods.
    pub omega: usize,
    /// Excess cap of radius-`R/2` balls in the enlarged tree-like set.
    pub c_q: usize,
}

impl Default for ParameterSet {
    fn default() -> Self {
        ParameterSet {
            c: 0.9,
            a: 2.0,
            b: 4.0,
            rr: 0.9 / 32.0,
            omega: 1,
            c_q: 10,
        }
    }
}

impl ParameterSet {
    /// The smallest exponents for which the proofs apply.
    pub fn theorem() -> Self {
        ParameterSet {
            c: 0.9,
            a: 12.0,
            b: 300.0,
            rr: 0.9 / 32.0,
            omega: 1,
            c_q: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidParameters(format!("𝔠 = {} must lie in (0, 1)", self.c)));
        }
        if !(self.a > 0.0 && self.b > 0.0 && self.rr > 0.0) {
            return Err(Error::InvalidParameters("𝔞, 𝔟 and 𝔯 must be positive".into()));
        }
        Ok(())
    }

    /// Conditions on the exponents themselves (not on `N`) that the proofs
    /// assume; desk-scale defaults violate some of them.
    pub fn theorem_regime_flags(&self) -> Vec<String> {
        let mut flags = Vec::new();
        if self.a < 12.0 {
            flags.push(format!("𝔞 = {} < 12", self.a));
        }
        if self.b < 25.0 * self.a {
            flags.push(format!("𝔟 = {} < 25𝔞", self.b));
        }
        if self.rr > self.c / 32.0 + 1e-15 {
            flags.push(format!("𝔯 = {} > 𝔠/32", self.rr));
        }
        flags
    }

    /// Integer schedule at size `n`, degree `d`.
    pub fn schedule(&self, n: usize, d: usize) -> Result<Schedule> {
        self.validate()?;
        if d < 3 || n < 3 {
            return Err(Error::InvalidParameters(format!("schedule needs d ≥ 3 and N ≥ 3, got d = {d}, N = {n}")));
        }
        let ln_n = (n as f64).ln();
        let lb = ((d - 1) as f64).ln();
        let log_dn = ln_n / lb;
        let loglog = ln_n.ln() / lb;
        let big_r = (self.c / 4.0 * log_dn).floor() as usize;
        let r = (self.rr * log_dn).floor() as usize;
        let lo = (self.a * loglog).ceil().max(0.0) as usize;
        let hi = (2.0 * self.a * loglog).floor().max(0.0) as usize;
        let mut flags = self.theorem_regime_flags();
        let window = if lo <= hi {
            (lo, hi)
        } else {
            flags.push(format!("empty ℓ window [{lo}, {hi}]"));
            let mid = (1.5 * self.a * loglog).round() as usize;
            (mid, mid)
        };
        let ell = window.0;
        if (big_r as f64) / 8.0 < r as f64 {
            flags.push(format!("R/8 = {} < r = {r}", big_r as f64 / 8.0));
        }
        if r <= ell {
            flags.push(format!("r = {r} is not ≫ ℓ = {ell}"));
        }
        Ok(Schedule {
            n,
            d,
            params: self.clone(),
            big_r,
            r,
            ell,
            ell_window: window,
            flags,
        })
    }
}

/// The rounded radii at a given size together with any violated relations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n: usize,
    pub d: usize,
    pub params: ParameterSet,
    /// Tree-like radius `R`.
    pub big_r: usize,
    /// Local-law radius `r`.
    pub r: usize,
    /// Default `ℓ`: the low end of the window.
    pub ell: usize,
    pub ell_window: (usize, usize),
    /// Relations of the schedule that fail at this size. Informational.
    pub flags: Vec<String>,
}

impl Schedule {
    pub fn in_theorem_regime(&self) -> bool {
        self.flags.is_empty()
    }

    /// `ℓ` in the window maximizing `|1 + m² + … + m^{2ℓ}|` at `z`.
    pub fn ell_for(&self, z: impl Into<C64>) -> usize {
        select_ell(z, self.ell_window.0, self.ell_window.1)
    }

    /// Lower edge `(log N)^𝔟 / N` of the theorem's spectral domain.
    pub fn eta_floor(&self) -> f64 {
        let ln_n = (self.n as f64).ln();
        (self.params.b * ln_n.ln() - ln_n).exp()
    }

    pub fn error_params(&self, z: SpectralParam) -> ErrorParams {
        error_params(z, self.n, self.d, self.r as f64, self.params.a)
    }
}

/// `ℓ ∈ [lo, hi]` maximizing `|Σ_{k≤ℓ} m_sc^{2k}|`; the smallest on ties.
pub fn select_ell(z: impl Into<C64>, lo: usize, hi: usize) -> usize {
    let m2 = m_sc(z).powu(2);
    let mut sum = C64::new(0.0, 0.0);
    let mut pow = C64::new(1.0, 0.0);
    let mut best = (lo, f64::NEG_INFINITY);
    for ell in 0..=hi.max(lo) {
        sum += pow;
        pow *= m2;
        if ell >= lo && sum.norm() > best.1 {
            best = (ell, sum.norm());
        }
    }
    best.0
}

/// Natural logarithms of the error parameters at one `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorParams {
    pub ln_eps0: f64,
    pub ln_eps: f64,
    pub ln_eps_prime: f64,
    pub ln_phi: f64,
    /// Which branch of the dichotomy applies: `ε = ε₀ ≤ (κ+η)/log N`.
    pub small_branch: bool,
    /// `(log N)^{-4𝔞}`, also stored as a log.
    pub ln_relation_scale: f64,
}

impl ErrorParams {
    pub fn eps0(&self) -> f64 {
        self.ln_eps0.exp()
    }

    pub fn eps(&self) -> f64 {
        self.ln_eps.exp()
    }

    pub fn eps_prime(&self) -> f64 {
        self.ln_eps_prime.exp()
    }

    pub fn phi(&self) -> f64 {
        self.ln_phi.exp()
    }

    /// `ε ≤ (log N)^{-4𝔞}` and `φ ≤ ε (log N)^{-4𝔞}`.
    pub fn relation_holds(&self) -> bool {
        self.ln_eps <= self.ln_relation_scale && self.ln_phi <= self.ln_eps + self.ln_relation_scale
    }
}

fn ln_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

pub fn error_params(z: SpectralParam, n: usize, d: usize, r: f64, a: f64) -> ErrorParams {
    error_params_log((n as f64).ln(), z.e(), z.eta().ln(), d, r, a)
}

/// Error parameters from `ln N`, `E` and `ln η`, so that neither `N` nor
/// `η` has to be representable.
pub fn error_params_log(ln_n: f64, e: f64, ln_eta: f64, d: usize, r: f64, a: f64) -> ErrorParams {
    let ln_l = ln_n.ln();
    let eta = ln_eta.exp();
    let im_md = m_d(C64::new(e, eta), d).im;
    let ln_im_md = im_md.ln();
    let ln_n_eta = ln_n + ln_eta;
    let ln_eps0 = 8.0 * a * ln_l
        + ln_sum_exp(&[
            -r * ((d - 1) as f64).ln(),
            0.5 * (ln_im_md - ln_n_eta),
            -2.0 / 3.0 * ln_n_eta,
        ]);
    let ln_k_eta = ln_sum_exp(&[kappa(e).ln(), ln_eta]);
    let small_branch = ln_eps0 <= ln_k_eta - ln_l;
    let ln_eps = if small_branch { ln_eps0 } else { 4.0 * ln_l + ln_eps0 };
    let ln_eps_prime = 3.0 * ln_l + ln_eps;
    // ε/√(κ+η+ε)
    let ln_ratio = ln_eps - 0.5 * ln_sum_exp(&[ln_k_eta, ln_eps]);
    let ln_phi = 2.0 * a * ln_l + 0.5 * (ln_sum_exp(&[ln_im_md, ln_eps_prime, ln_ratio]) - ln_n_eta);
    ErrorParams {
        ln_eps0,
        ln_eps,
        ln_eps_prime,
        ln_phi,
        small_branch,
        ln_relation_scale: -4.0 * a * ln_l,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(z: SpectralParam, n: usize, d: usize, r: f64, a: f64) -> (f64, f64, f64, f64) {
        let l = (n as f64).ln();
        let eta = z.eta();
        let md = m_d(z, d).im;
        let ne = n as f64 * eta;
        let eps0 = l.powf(8.0 * a) * (((d - 1) as f64).powf(-r) + (md / ne).sqrt() + ne.powf(-2.0 / 3.0));
        let ke = z.kappa() + eta;
        let eps = if eps0 <= ke / l { eps0 } else { l.powi(4) * eps0 };
        let epsp = l.powi(3) * eps;
        let phi = l.powf(2.0 * a) * ((md + epsp + eps / (ke + eps).sqrt()) / ne).sqrt();
        (eps0, eps, epsp, phi)
    }

    #[test]
    fn log_space_matches_direct() {
        for &(e, eta, n) in &[(0.5, 0.05, 1000), (2.5, 1.0, 2000), (-1.0, 10.0, 500), (0.0, 1e-3, 10_000)] {
            let z = SpectralParam::new(e, eta).unwrap();
            let ep = error_params(z, n, 3, 0.0, 2.0);
            let (eps0, eps, epsp, phi) = direct(z, n, 3, 0.0, 2.0);
            for (a, b) in [(ep.eps0(), eps0), (ep.eps(), eps), (ep.eps_prime(), epsp), (ep.phi(), phi)] {
                assert!((a / b - 1.0).abs() < 1e-10, "{a} vs {b}");
            }
            assert!((ep.eps_prime() / ep.eps() - (n as f64).ln().powi(3)).abs() < 1e-6 * ep.eps_prime() / ep.eps());
        }
    }

    #[test]
    fn dichotomy() {
        // tiny ε₀ far from the spectrum with huge N; large ε₀ at desk scale
        let ep = error_params_log(1e5, 3.0, 0.0, 3, 1e5 * 0.9 / 32.0 / 2f64.ln(), 12.0);
        assert!(ep.small_branch);
        assert_eq!(ep.ln_eps, ep.ln_eps0);
        let z = SpectralParam::new(0.5, 0.05).unwrap();
        let ep = error_params(z, 1000, 3, 0.0, 2.0);
        assert!(!ep.small_branch);
        assert!((ep.ln_eps - ep.ln_eps0 - 4.0 * 1000f64.ln().ln()).abs() < 1e-12);
    }

    #[test]
    fn far_field_limit() {
        let ln_n = 1000f64.ln();
        let r = 2.0;
        let ep = error_params_log(ln_n, 0.0, 60.0, 3, r, 2.0);
        let limit = 16.0 * ln_n.ln() - r * 2f64.ln();
        assert!((ep.ln_eps0 - limit).abs() < 1e-9);
    }

    #[test]
    fn relations_hold_asymptotically() {
        let p = ParameterSet::theorem();
        let ln_n = 1e5;
        let lb = 2f64.ln();
        let r = (p.rr * ln_n / lb).floor();
        let ln_eta = p.b * ln_n.ln() - ln_n;
        for k in 0..41 {
            let e = -3.0 + 0.15 * k as f64;
            for &extra in &[0.0, 5.0, 20.0, ln_n] {
                let ep = error_params_log(ln_n, e, (ln_eta + extra).min(3.0), 3, r, p.a);
                assert!(ep.relation_holds(), "E = {e}, ln η = {}", ln_eta + extra);
            }
        }
    }

    #[test]
    fn desk_schedule() {
        let s = ParameterSet::default().schedule(1000, 3).unwrap();
        assert_eq!(s.big_r, 2);
        assert_eq!(s.r, 0);
        assert_eq!(s.ell_window, (6, 11));
        assert!(!s.in_theorem_regime());
        let z = SpectralParam::new(0.5, 0.05).unwrap();
        let ell = s.ell_for(z);
        assert!((6..=11).contains(&ell));
        assert!(ParameterSet { c: 1.5, ..Default::default() }.schedule(100, 3).is_err());
    }

    #[test]
    fn select_ell_maximizes_partial_sum() {
        let z = C64::new(0.1, 0.01);
        let m2 = m_sc(z).powu(2);
        let ell = select_ell(z, 2, 9);
        let s = |l: usize| (0..=l).map(|k| m2.powu(k as u32)).sum::<C64>().norm();
        assert!((2..=9).all(|l| s(l) <= s(ell) + 1e-14));
    }
}
