//! Experiments on the eigenvalues and eigenvectors of `H`.

use serde::{Deserialize, Serialize};

use super::table::{num, Table};
use super::{loglog_slope, map_samples, mean, median, provenance, ExperimentConfig, PROVENANCE};
use crate::error::Result;
use crate::graph::classify_tree_like;
use crate::green::{eigenvalues, spectral_decompose};
use crate::scalar::{classical_locations, km_cdf};

/// Eigenvalues of one sample, descending, with its tree-like verdict.
#[derive(Clone, Debug)]
pub struct SpectrumSample {
    pub n: usize,
    pub sample: usize,
    pub eigenvalues: Vec<f64>,
    pub tree_like: bool,
}

/// Eigenvalue-only decomposition of every configured sample.
pub fn sample_spectra(cfg: &ExperimentConfig) -> Result<Vec<SpectrumSample>> {
    cfg.validate()?;
    map_samples(cfg, |n, sample, g| {
        let s = cfg.params.schedule(n, cfg.d)?;
        let tree_like = classify_tree_like(g, s.big_r, cfg.params.omega, cfg.params.c, cfg.params.c_q).in_omega_bar;
        Ok(SpectrumSample {
            n,
            sample,
            eigenvalues: eigenvalues(g, cfg.d)?,
            tree_like,
        })
    })
}

fn distinct_ns(spectra: &[SpectrumSample]) -> Vec<usize> {
    let mut ns: Vec<usize> = spectra.iter().map(|s| s.n).collect();
    ns.dedup();
    ns
}

/// 1-based eigenvalue indices counted as bulk: `[0.05N, 0.95N]`, `i ≥ 2`.
pub fn bulk_range(n: usize) -> (usize, usize) {
    let lo = ((0.05 * n as f64).ceil() as usize).max(2);
    let hi = (0.95 * n as f64).floor() as usize;
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigiditySample {
    pub n: usize,
    pub sample: usize,
    pub bulk_max: f64,
    pub edge_max: f64,
    /// `Σ λ_i = tr H = 0` up to rounding.
    pub trace: f64,
    pub tree_like: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityByN {
    pub n: usize,
    pub mean_bulk_max: f64,
    pub median_bulk_max: f64,
    pub mean_edge_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigiditySummary {
    pub per_n: Vec<RigidityByN>,
    /// Least-squares slope of `log(mean bulk max)` against `log N`.
    pub slope: Option<f64>,
}

pub struct RigidityResult {
    pub samples: Vec<RigiditySample>,
    pub summary: RigiditySummary,
    pub tables: Vec<Table>,
}

/// `|λ_i - γ_i|` for every sample and index `2 ≤ i ≤ N`.
pub fn rigidity(cfg: &ExperimentConfig, spectra: &[SpectrumSample]) -> Result<RigidityResult> {
    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend(["n", "i", "lambda", "gamma", "deviation", "bulk"]);
    let mut rows = Table::new("rigidity", &head);
    let mut head = PROVENANCE.to_vec();
    head.extend(["n", "bulk_max", "edge_max", "trace", "tree_like"]);
    let mut per_sample_table = Table::new("rigidity_samples", &head);
    let mut samples = Vec::new();
    let mut per_n = Vec::new();
    for n in distinct_ns(spectra) {
        let gamma = classical_locations(n, cfg.d)?;
        let (lo, hi) = bulk_range(n);
        for s in spectra.iter().filter(|s| s.n == n) {
            let (mut bulk_max, mut edge_max) = (0.0f64, 0.0f64);
            for i in 2..=n {
                let lambda = s.eigenvalues[i - 1];
                let dev = (lambda - gamma[i - 2]).abs();
                let bulk = (lo..=hi).contains(&i);
                if bulk {
                    bulk_max = bulk_max.max(dev);
                } else {
                    edge_max = edge_max.max(dev);
                }
                let mut row = provenance(cfg, s.sample, &hash);
                row.extend([n.to_string(), i.to_string(), num(lambda), num(gamma[i - 2]), num(dev), bulk.to_string()]);
                rows.push(row);
            }
            let trace: f64 = s.eigenvalues.iter().sum();
            let mut row = provenance(cfg, s.sample, &hash);
            row.extend([n.to_string(), num(bulk_max), num(edge_max), num(trace), s.tree_like.to_string()]);
            per_sample_table.push(row);
            samples.push(RigiditySample {
                n,
                sample: s.sample,
                bulk_max,
                edge_max,
                trace,
                tree_like: s.tree_like,
            });
        }
        let here: Vec<&RigiditySample> = samples.iter().filter(|r| r.n == n).collect();
        let bulk: Vec<f64> = here.iter().map(|r| r.bulk_max).collect();
        let edge: Vec<f64> = here.iter().map(|r| r.edge_max).collect();
        per_n.push(RigidityByN {
            n,
            mean_bulk_max: mean(&bulk),
            median_bulk_max: median(&bulk),
            mean_edge_max: mean(&edge),
        });
    }
    let slope = loglog_slope(&per_n.iter().map(|r| (r.n as f64, r.mean_bulk_max)).collect::<Vec<_>>());
    Ok(RigidityResult {
        samples,
        summary: RigiditySummary { per_n, slope },
        tables: vec![rows, per_sample_table],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSample {
    pub n: usize,
    pub sample: usize,
    pub lambda_1: f64,
    pub lambda_2: f64,
    pub abs_lambda_n: f64,
    pub tree_like: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalByN {
    pub n: usize,
    pub max_lambda_2: f64,
    pub max_abs_lambda_n: f64,
    pub median_lambda_2_minus_2: f64,
    /// `(t, #{λ_2 > 2 + t}, #{|λ_N| > 2 + t})`.
    pub exceedances: Vec<(f64, usize, usize)>,
}

pub const EXCEEDANCE_GRID: [f64; 6] = [0.0, 0.005, 0.01, 0.02, 0.05, 0.1];

pub struct ExtremalResult {
    pub samples: Vec<ExtremalSample>,
    pub per_n: Vec<ExtremalByN>,
    pub tables: Vec<Table>,
}

pub fn extremal(cfg: &ExperimentConfig, spectra: &[SpectrumSample]) -> ExtremalResult {
    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend(["n", "lambda_1", "lambda_2", "abs_lambda_n", "tree_like"]);
    let mut table = Table::new("extremal", &head);
    let samples: Vec<ExtremalSample> = spectra
        .iter()
        .map(|s| ExtremalSample {
            n: s.n,
            sample: s.sample,
            lambda_1: s.eigenvalues[0],
            lambda_2: s.eigenvalues[1],
            abs_lambda_n: s.eigenvalues[s.n - 1].abs(),
            tree_like: s.tree_like,
        })
        .collect();
    for r in &samples {
        let mut row = provenance(cfg, r.sample, &hash);
        row.extend([r.n.to_string(), num(r.lambda_1), num(r.lambda_2), num(r.abs_lambda_n), r.tree_like.to_string()]);
        table.push(row);
    }
    let mut head = vec!["n", "t", "exceed_lambda_2", "exceed_abs_lambda_n"];
    head.truncate(4);
    let mut exceed = Table::new("extremal_exceedance", &head);
    let mut per_n = Vec::new();
    for n in distinct_ns(spectra) {
        let here: Vec<&ExtremalSample> = samples.iter().filter(|r| r.n == n).collect();
        let l2: Vec<f64> = here.iter().map(|r| r.lambda_2).collect();
        let ln: Vec<f64> = here.iter().map(|r| r.abs_lambda_n).collect();
        let exceedances: Vec<(f64, usize, usize)> = EXCEEDANCE_GRID
            .iter()
            .map(|&t| {
                (
                    t,
                    l2.iter().filter(|&&x| x > 2.0 + t).count(),
                    ln.iter().filter(|&&x| x > 2.0 + t).count(),
                )
            })
            .collect();
        for &(t, a, b) in &exceedances {
            exceed.push(vec![n.to_string(), num(t), a.to_string(), b.to_string()]);
        }
        per_n.push(ExtremalByN {
            n,
            max_lambda_2: l2.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            max_abs_lambda_n: ln.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            median_lambda_2_minus_2: median(&l2.iter().map(|x| x - 2.0).collect::<Vec<_>>()),
            exceedances,
        });
    }
    ExtremalResult {
        samples,
        per_n,
        tables: vec![table, exceed],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelocalizationSample {
    pub n: usize,
    pub sample: usize,
    /// `max_k √N ‖v_k‖_∞` over non-trivial unit eigenvectors.
    pub s_max: f64,
    /// The same statistic for the top eigenvector (1 for connected graphs).
    pub s_trivial: f64,
    pub bulk_max: f64,
    pub bulk_median: f64,
    pub edge_max: f64,
    pub edge_median: f64,
    pub tree_like: bool,
}

/// Eigenvalues with `|λ| > EDGE_CUT` count as the edge region.
pub const EDGE_CUT: f64 = 1.8;

pub struct DelocalizationResult {
    pub samples: Vec<DelocalizationSample>,
    /// `(N, max over samples of s_max)`.
    pub per_n: Vec<(usize, f64)>,
    pub tables: Vec<Table>,
}

pub fn delocalization(cfg: &ExperimentConfig) -> Result<DelocalizationResult> {
    cfg.validate()?;
    let samples = map_samples(cfg, |n, sample, g| {
        let sd = spectral_decompose(g, cfg.d)?;
        let stat = |k: usize| {
            let v = sd.vector(k);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n as f64).sqrt() * v.iter().fold(0.0f64, |m, x| m.max(x.abs())) / norm
        };
        let (mut bulk, mut edge) = (Vec::new(), Vec::new());
        for k in 1..n {
            let s = stat(k);
            if sd.eigenvalues()[k].abs() > EDGE_CUT {
                edge.push(s);
            } else {
                bulk.push(s);
            }
        }
        let maxf = |v: &[f64]| v.iter().cloned().fold(0.0f64, f64::max);
        let s = cfg.params.schedule(n, cfg.d)?;
        Ok(DelocalizationSample {
            n,
            sample,
            s_max: maxf(&bulk).max(maxf(&edge)),
            s_trivial: stat(0),
            bulk_max: maxf(&bulk),
            bulk_median: median(&bulk),
            edge_max: maxf(&edge),
            edge_median: median(&edge),
            tree_like: classify_tree_like(g, s.big_r, cfg.params.omega, cfg.params.c, cfg.params.c_q).in_omega_bar,
        })
    })?;
    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend([
        "n",
        "s_max",
        "s_trivial",
        "bulk_max",
        "bulk_median",
        "edge_max",
        "edge_median",
        "five_log_n",
        "tree_like",
    ]);
    let mut table = Table::new("delocalization", &head);
    for r in &samples {
        let mut row = provenance(cfg, r.sample, &hash);
        row.extend([
            r.n.to_string(),
            num(r.s_max),
            num(r.s_trivial),
            num(r.bulk_max),
            num(r.bulk_median),
            num(r.edge_max),
            num(r.edge_median),
            num(5.0 * (r.n as f64).ln()),
            r.tree_like.to_string(),
        ]);
        table.push(row);
    }
    let mut ns: Vec<usize> = samples.iter().map(|r| r.n).collect();
    ns.dedup();
    let per_n = ns
        .into_iter()
        .map(|n| {
            let m = samples.iter().filter(|r| r.n == n).map(|r| r.s_max).fold(0.0f64, f64::max);
            (n, m)
        })
        .collect();
    Ok(DelocalizationResult {
        samples,
        per_n,
        tables: vec![table],
    })
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `values` and the Kesten–McKay law.
pub fn ks_distance(values: &[f64], d: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = km_cdf(x, d);
            ((k + 1) as f64 / m - f).max(f - k as f64 / m)
        })
        .fold(0.0, f64::max)
}

pub struct KsResult {
    /// `(N, sample, KS)`.
    pub samples: Vec<(usize, usize, f64)>,
    /// `(N, mean KS)`.
    pub per_n: Vec<(usize, f64)>,
    pub tables: Vec<Table>,
}

/// KS distance of `λ_2, …, λ_N` to the Kesten–McKay law per sample.
pub fn km_fit(cfg: &ExperimentConfig, spectra: &[SpectrumSample]) -> KsResult {
    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend(["n", "ks", "tree_like"]);
    let mut table = Table::new("km_fit", &head);
    let samples: Vec<(usize, usize, f64)> = spectra
        .iter()
        .map(|s| (s.n, s.sample, ks_distance(&s.eigenvalues[1..], cfg.d)))
        .collect();
    for (s, &(n, sample, ks)) in spectra.iter().zip(&samples) {
        let mut row = provenance(cfg, sample, &hash);
        row.extend([n.to_string(), num(ks), s.tree_like.to_string()]);
        table.push(row);
    }
    let per_n = distinct_ns(spectra)
        .into_iter()
        .map(|n| {
            let v: Vec<f64> = samples.iter().filter(|r| r.0 == n).map(|r| r.2).collect();
            (n, mean(&v))
        })
        .collect();
    KsResult {
        samples,
        per_n,
        tables: vec![table],
    }
}
