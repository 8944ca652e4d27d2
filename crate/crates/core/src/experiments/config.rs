use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{generate_regular_with, RegularGraph, DEFAULT_MAX_ATTEMPTS};
use crate::scalar::{ParameterSet, SpectralParam};

/// Spectral-parameter grid: `E` evenly spaced, `η` between a floor and
/// `eta_max`, plus optional far-field rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub e_points: usize,
    /// Lower end of the `η` range is `max(eta_min, eta_floor_factor / N)`.
    pub eta_min: f64,
    pub eta_floor_factor: f64,
    pub eta_max: f64,
    pub eta_points: usize,
    pub log_spacing: bool,
    /// Additional `η` values evaluated on the same `E` points.
    pub far_field: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            e_min: -2.5,
            e_max: 2.5,
            e_points: 11,
            eta_min: 0.0,
            eta_floor_factor: 10.0,
            eta_max: 1.0,
            eta_points: 8,
            log_spacing: true,
            far_field: Vec::new(),
        }
    }
}

fn spaced(lo: f64, hi: f64, k: usize, log: bool) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..k)
            .map(|t| {
                let s = t as f64 / (k - 1) as f64;
                if log {
                    (lo.ln() + s * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + s * (hi - lo)
                }
            })
            .collect(),
    }
}

impl GridSpec {
    pub fn eta_floor(&self, n: usize) -> f64 {
        self.eta_min.max(self.eta_floor_factor / n as f64)
    }

    /// Grid points for size `n`, `η`-major then `E`.
    pub fn points(&self, n: usize) -> Result<Vec<SpectralParam>> {
        let lo = self.eta_floor(n);
        if !(lo > 0.0) || lo > self.eta_max {
            return Err(Error::InvalidParameters(format!(
                "η range [{lo}, {}] is empty or not positive",
                self.eta_max
            )));
        }
        let es = spaced(self.e_min, self.e_max, self.e_points, false);
        let mut etas = spaced(lo, self.eta_max, self.eta_points, self.log_spacing);
        etas.extend(self.far_field.iter().copied());
        let mut out = Vec::with_capacity(es.len() * etas.len());
        for &eta in &etas {
            for &e in &es {
                out.push(SpectralParam::new(e, eta)?);
            }
        }
        Ok(out)
    }
}

/// Everything an experiment run depends on besides the thread count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub ns: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub params: ParameterSet,
    /// `C` in the practical bound `C/√(Nη)`.
    pub practical_c: f64,
    /// Single spectral parameter `z = z_e + i·eta_scale·N^{-eta_power}`
    /// used by the self-consistent experiment.
    pub z_e: f64,
    pub eta_scale: f64,
    pub eta_power: f64,
    /// Tree depth `ℓ`; defaults to the schedule's choice at `z`.
    pub ell: Option<usize>,
    /// Compute `Q(G, z)` (needs eigenvectors).
    pub with_q: bool,
    /// Vertex pairs per sample for entrywise comparisons.
    pub pairs: usize,
    /// Radius of the neighborhoods `B_r(i, j)` in entrywise comparisons.
    pub entry_radius: usize,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 3,
            ns: vec![500, 1000, 2000],
            samples: 20,
            seed: 1,
            grid: GridSpec::default(),
            params: ParameterSet::default(),
            practical_c: 20.0,
            z_e: 0.5,
            eta_scale: 1.0,
            eta_power: 0.5,
            ell: None,
            with_q: true,
            pairs: 0,
            entry_radius: 2,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d < 3 {
            return Err(Error::InvalidParameters(format!("d = {} must be at least 3", self.d)));
        }
        if self.ns.is_empty() || self.samples == 0 {
            return Err(Error::InvalidParameters("need at least one N and one sample".into()));
        }
        for &n in &self.ns {
            if (n * self.d) % 2 != 0 || n <= self.d {
                return Err(Error::InvalidParameters(format!("no {}-regular graph on {n} vertices", self.d)));
            }
        }
        self.params.validate()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// `z` of the single-point experiments at size `n`.
    pub fn single_z(&self, n: usize) -> Result<SpectralParam> {
        SpectralParam::new(self.z_e, self.eta_scale * (n as f64).powf(-self.eta_power))
    }

    /// Independent stream per `(n, sample)`, so results do not depend on
    /// which other sizes or how many samples are run.
    pub fn rng(&self, n: usize, sample: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((n as u64) << 32) | sample as u64);
        rng
    }

    pub fn sample_graph(&self, n: usize, sample: usize) -> Result<RegularGraph> {
        generate_regular_with(n, self.d, &mut self.rng(n, sample), DEFAULT_MAX_ATTEMPTS)
    }

    /// `(n, sample)` work items in output order.
    pub fn work_items(&self) -> Vec<(usize, usize)> {
        self.ns
            .iter()
            .flat_map(|&n| (0..self.samples).map(move |s| (n, s)))
            .collect()
    }
}
