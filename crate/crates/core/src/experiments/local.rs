//! Experiments on `m_N`, `Q` and Green's function entries at fixed `z`.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::table::{num, Table};
use super::{aux_rng, map_samples, mean, median, provenance, ExperimentConfig, PROVENANCE};
use crate::error::Result;
use crate::graph::{ball, classify_tree_like, DeficitGraph, RegularGraph};
use crate::green::{eigenvalues, green_ext, q_spectral, spectral_decompose, SpectralData, WeightedExtension};
use crate::scalar::{delta_m, delta_q, m_d, m_sc, x_ell, y_ell, Schedule, SpectralParam};

fn m_n_from(eigs: &[f64], z: C64) -> C64 {
    eigs.iter().map(|&l| 1.0 / (l - z)).sum::<C64>() / eigs.len() as f64
}

/// `1/(N(d/√(d-1) - z))`, the trivial eigenvalue's share of `m_N`.
fn trivial_term(z: C64, n: usize, d: usize) -> C64 {
    let s = ((d - 1) as f64).sqrt();
    1.0 / (n as f64 * (d as f64 / s - z))
}

fn re_im(x: C64) -> [String; 2] {
    [num(x.re), num(x.im)]
}

/// `count` pairs `(i, j)` with `i` uniform and `j` uniform in `B_radius(i)`.
pub fn entry_pairs<R: Rng + ?Sized>(g: &RegularGraph, count: usize, radius: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.random_range(0..g.n());
        let nb = ball(g, &[i], radius)?;
        let j = nb.ids[rng.random_range(0..nb.len())];
        out.push((i, j));
    }
    Ok(out)
}

/// `G_ij(Ext(B_r(i, j), Δ), z)`.
fn ext_entry(base: &DeficitGraph, g: &RegularGraph, i: usize, j: usize, r: usize, delta: C64, z: SpectralParam) -> Result<C64> {
    let nb = ball(g, &[i, j], r)?;
    let (li, lj) = (nb.local_of(i).unwrap(), nb.local_of(j).unwrap());
    let gm = green_ext(&WeightedExtension::new(base.restrict(&nb), delta, z))?;
    Ok(gm.get(li, lj))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalLawRecord {
    pub n: usize,
    pub sample: usize,
    pub z: SpectralParam,
    pub m_n: C64,
    pub m_d: C64,
    pub deviation: f64,
    /// Paper `ε(z)`; may be astronomically large or infinite at desk scale.
    pub eps: f64,
    pub kappa: f64,
    pub paper_bound: f64,
    pub practical_bound: f64,
    pub q: Option<C64>,
    pub q_deviation: Option<f64>,
    /// `m_N - m_d - 1/(N(d/√(d-1) - z))`.
    pub improved: C64,
    pub tree_like: bool,
}

impl LocalLawRecord {
    pub fn within_practical(&self) -> bool {
        self.deviation <= self.practical_bound
    }
}

pub struct LocalLawResult {
    pub records: Vec<LocalLawRecord>,
    /// `(n, sample, e, eta, i, j, G_ij, Ext_ij)`.
    pub entries: Vec<(usize, usize, f64, f64, usize, usize, C64, C64)>,
    pub summary: Value,
    pub tables: Vec<Table>,
}

/// `|m_N - m_d|` over the configured grid, with both bound columns and an
/// optional entrywise comparison against `Ext(B_r(i, j), m_sc)`.
pub fn local_law(cfg: &ExperimentConfig) -> Result<LocalLawResult> {
    cfg.validate()?;
    let d = cfg.d;
    type Entry = (usize, usize, f64, f64, usize, usize, C64, C64);
    let per_sample: Vec<(Vec<LocalLawRecord>, Vec<Entry>)> = map_samples(cfg, |n, sample, g| {
        let sched = cfg.params.schedule(n, d)?;
        let tree_like = classify_tree_like(g, sched.big_r, cfg.params.omega, cfg.params.c, cfg.params.c_q).in_omega_bar;
        let full = cfg.with_q || cfg.pairs > 0;
        let sd = if full { Some(spectral_decompose(g, d)?) } else { None };
        let eigs = match &sd {
            Some(sd) => sd.eigenvalues().to_vec(),
            None => eigenvalues(g, d)?,
        };
        let pairs = entry_pairs(g, cfg.pairs, 1, &mut aux_rng(cfg, n, sample))?;
        let base = DeficitGraph::from_regular(g);
        let mut records = Vec::new();
        let mut entries = Vec::new();
        for z in cfg.grid.points(n)? {
            let zc = z.z();
            let mn = m_n_from(&eigs, zc);
            let md = m_d(zc, d);
            let eps = sched.error_params(z).eps();
            let kappa = z.kappa();
            let q = match &sd {
                Some(sd) if cfg.with_q => Some(q_spectral(g, sd, z)?),
                _ => None,
            };
            records.push(LocalLawRecord {
                n,
                sample,
                z,
                m_n: mn,
                m_d: md,
                deviation: (mn - md).norm(),
                eps,
                kappa,
                paper_bound: eps / (kappa + z.eta() + eps).sqrt(),
                practical_bound: cfg.practical_c / (n as f64 * z.eta()).sqrt(),
                q,
                q_deviation: q.map(|q| (q - m_sc(zc)).norm()),
                improved: mn - md - trivial_term(zc, n, d),
                tree_like,
            });
            if let Some(sd) = &sd {
                let m = m_sc(zc);
                for (gij, &(i, j)) in sd.green_entries(&pairs, z).into_iter().zip(&pairs) {
                    let ext = ext_entry(&base, g, i, j, cfg.entry_radius, m, z)?;
                    entries.push((n, sample, z.e(), z.eta(), i, j, gij, ext));
                }
            }
        }
        Ok((records, entries))
    })?;
    let mut records = Vec::new();
    let mut entries = Vec::new();
    for (r, e) in per_sample {
        records.extend(r);
        entries.extend(e);
    }

    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend([
        "n",
        "e",
        "eta",
        "m_n_re",
        "m_n_im",
        "m_d_re",
        "m_d_im",
        "deviation",
        "eps",
        "kappa",
        "paper_bound",
        "practical_bound",
        "q_re",
        "q_im",
        "q_deviation",
        "improved_re",
        "improved_im",
        "tree_like",
    ]);
    let mut table = Table::new("local_law", &head);
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for r in &records {
        let mut row = provenance(cfg, r.sample, &hash);
        row.push(r.n.to_string());
        row.extend([num(r.z.e()), num(r.z.eta())]);
        row.extend(re_im(r.m_n));
        row.extend(re_im(r.m_d));
        row.extend([num(r.deviation), num(r.eps), num(r.kappa), num(r.paper_bound), num(r.practical_bound)]);
        row.extend([opt(r.q.map(|q| q.re)), opt(r.q.map(|q| q.im)), opt(r.q_deviation)]);
        row.extend(re_im(r.improved));
        row.push(r.tree_like.to_string());
        table.push(row);
    }
    let mut head = PROVENANCE.to_vec();
    head.extend(["n", "e", "eta", "i", "j", "g_re", "g_im", "ext_re", "ext_im", "residual"]);
    let mut entry_table = Table::new("local_law_entries", &head);
    for &(n, sample, e, eta, i, j, gij, ext) in &entries {
        let mut row = provenance(cfg, sample, &hash);
        row.extend([n.to_string(), num(e), num(eta), i.to_string(), j.to_string()]);
        row.extend(re_im(gij));
        row.extend(re_im(ext));
        row.push(num((gij - ext).norm()));
        entry_table.push(row);
    }

    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.dedup();
    let per_n: Vec<Value> = ns
        .iter()
        .map(|&n| {
            let here: Vec<&LocalLawRecord> = records.iter().filter(|r| r.n == n).collect();
            let within = here.iter().filter(|r| r.within_practical()).count();
            let far: Vec<&&LocalLawRecord> = here.iter().filter(|r| r.z.eta() >= 5.0).collect();
            let far_ok = far
                .iter()
                .filter(|r| r.deviation <= 2.0 * (cfg.d as f64) / r.z.eta().powi(2))
                .count();
            let devs: Vec<f64> = here.iter().map(|r| r.deviation).collect();
            json!({
                "n": n,
                "cells": here.len(),
                "within_practical": within,
                "fraction_within_practical": within as f64 / here.len() as f64,
                "far_field_cells": far.len(),
                "far_field_within": far_ok,
                "median_deviation": median(&devs),
            })
        })
        .collect();
    let residuals: Vec<f64> = entries.iter().map(|e| (e.6 - e.7).norm()).collect();
    let summary = json!({
        "per_n": per_n,
        "entry_pairs": entries.len(),
        "entry_residual_max": residuals.iter().cloned().fold(0.0f64, f64::max),
        "entry_residual_median": median(&residuals),
    });
    Ok(LocalLawResult {
        records,
        entries,
        summary,
        tables: vec![table, entry_table],
    })
}

/// Complex sample mean with the spread of `|x - mean|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub count: usize,
    pub mean: C64,
    pub mean_abs: f64,
    /// `√(Σ|x - mean|² / (k - 1))`.
    pub std: f64,
    pub stderr: f64,
    /// `|mean| / stderr`.
    pub ratio: f64,
}

impl ResidualStats {
    pub fn of(xs: &[C64]) -> Self {
        let k = xs.len();
        let mean = xs.iter().sum::<C64>() / k as f64;
        let ss: f64 = xs.iter().map(|x| (x - mean).norm_sqr()).sum();
        let std = if k > 1 { (ss / (k - 1) as f64).sqrt() } else { f64::NAN };
        let stderr = std / (k as f64).sqrt();
        ResidualStats {
            count: k,
            mean,
            mean_abs: xs.iter().map(|x| x.norm()).sum::<f64>() / k as f64,
            std,
            stderr,
            ratio: mean.norm() / stderr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistentSample {
    pub n: usize,
    pub sample: usize,
    pub z: SpectralParam,
    pub ell: usize,
    pub q: C64,
    pub m_n: C64,
    /// `Q - Y_ℓ(Q)`.
    pub r1: C64,
    /// `r1 - δ_Q`.
    pub r2: C64,
    /// `m_N - X_ℓ(Q)`.
    pub s1: C64,
    /// `s1 - δ_m`.
    pub s2: C64,
    /// `m_N - m_d`.
    pub plain: C64,
    /// `m_N - m_d - 1/(N(d/√(d-1) - z))`.
    pub improved: C64,
    pub tree_like: bool,
}

pub struct SelfConsistentResult {
    pub samples: Vec<SelfConsistentSample>,
    /// `(n, [r1, r2, s1, s2, plain, improved])`.
    pub per_n: Vec<(usize, [ResidualStats; 6])>,
    pub tables: Vec<Table>,
}

const RESIDUALS: [&str; 6] = ["r1", "r2", "s1", "s2", "plain", "improved"];

impl SelfConsistentResult {
    pub fn summary(&self) -> Value {
        let per_n: Vec<Value> = self
            .per_n
            .iter()
            .map(|(n, stats)| {
                let mut m = serde_json::Map::new();
                m.insert("n".into(), json!(n));
                for (name, s) in RESIDUALS.iter().zip(stats) {
                    m.insert(name.to_string(), serde_json::to_value(s).unwrap());
                }
                Value::Object(m)
            })
            .collect();
        json!({ "per_n": per_n })
    }
}

/// The residuals of `Q ≈ Y_ℓ(Q)` and `m_N ≈ X_ℓ(Q)` at `z = z_e + i·η(N)`,
/// before and after the deterministic corrections.
pub fn self_consistent(cfg: &ExperimentConfig) -> Result<SelfConsistentResult> {
    cfg.validate()?;
    let d = cfg.d;
    let samples = map_samples(cfg, |n, sample, g| {
        let sched = cfg.params.schedule(n, d)?;
        let z = cfg.single_z(n)?;
        let zc = z.z();
        let ell = cfg.ell.unwrap_or_else(|| sched.ell_for(zc));
        let sd = spectral_decompose(g, d)?;
        let q = q_spectral(g, &sd, z)?;
        let m_n = sd.m_n(z);
        let r1 = q - y_ell(q, zc, ell);
        let s1 = m_n - x_ell(q, zc, ell, d);
        let plain = m_n - m_d(zc, d);
        Ok(SelfConsistentSample {
            n,
            sample,
            z,
            ell,
            q,
            m_n,
            r1,
            r2: r1 - delta_q(zc, ell, n, d),
            s1,
            s2: s1 - delta_m(zc, ell, n, d),
            plain,
            improved: plain - trivial_term(zc, n, d),
            tree_like: classify_tree_like(g, sched.big_r, cfg.params.omega, cfg.params.c, cfg.params.c_q).in_omega_bar,
        })
    })?;
    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend(["n", "e", "eta", "ell", "q_re", "q_im", "m_n_re", "m_n_im"]);
    head.extend([
        "r1_re", "r1_im", "r2_re", "r2_im", "s1_re", "s1_im", "s2_re", "s2_im", "plain_re", "plain_im",
        "improved_re", "improved_im", "tree_like",
    ]);
    let mut table = Table::new("self_consistent", &head);
    for s in &samples {
        let mut row = provenance(cfg, s.sample, &hash);
        row.extend([s.n.to_string(), num(s.z.e()), num(s.z.eta()), s.ell.to_string()]);
        for x in [s.q, s.m_n, s.r1, s.r2, s.s1, s.s2, s.plain, s.improved] {
            row.extend(re_im(x));
        }
        row.push(s.tree_like.to_string());
        table.push(row);
    }
    let mut stats_table = Table::new(
        "self_consistent_stats",
        &["n", "residual", "count", "mean_re", "mean_im", "mean_abs", "std", "stderr", "ratio"],
    );
    let mut ns: Vec<usize> = samples.iter().map(|s| s.n).collect();
    ns.dedup();
    let mut per_n = Vec::new();
    for n in ns {
        let here: Vec<&SelfConsistentSample> = samples.iter().filter(|s| s.n == n).collect();
        let col = |f: fn(&SelfConsistentSample) -> C64| ResidualStats::of(&here.iter().map(|s| f(s)).collect::<Vec<_>>());
        let stats = [
            col(|s| s.r1),
            col(|s| s.r2),
            col(|s| s.s1),
            col(|s| s.s2),
            col(|s| s.plain),
            col(|s| s.improved),
        ];
        for (name, st) in RESIDUALS.iter().zip(&stats) {
            stats_table.push(vec![
                n.to_string(),
                name.to_string(),
                st.count.to_string(),
                num(st.mean.re),
                num(st.mean.im),
                num(st.mean_abs),
                num(st.std),
                num(st.stderr),
                num(st.ratio),
            ]);
        }
        per_n.push((n, stats));
    }
    Ok(SelfConsistentResult {
        samples,
        per_n,
        tables: vec![table, stats_table],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImprovedByZ {
    pub n: usize,
    pub z: SpectralParam,
    pub samples: usize,
    pub mean_abs_plain: f64,
    pub mean_abs_improved: f64,
    pub mean_improved: C64,
    pub std_improved: f64,
    /// Largest `|1/(N(λ_1 - z)) - 1/(N(d/√(d-1) - z))|` over samples.
    pub lambda1_term_residual: f64,
}

pub struct ImprovedResult {
    pub per_z: Vec<ImprovedByZ>,
    pub tables: Vec<Table>,
}

/// Plain versus trivial-eigenvalue-corrected `m_N - m_d` over the grid.
pub fn improved_local_law(cfg: &ExperimentConfig) -> Result<ImprovedResult> {
    cfg.validate()?;
    let d = cfg.d;
    let per_sample = map_samples(cfg, |n, sample, g| {
        let eigs = eigenvalues(g, d)?;
        let cells: Vec<(SpectralParam, C64, C64, f64)> = cfg
            .grid
            .points(n)?
            .into_iter()
            .map(|z| {
                let zc = z.z();
                let plain = m_n_from(&eigs, zc) - m_d(zc, d);
                let corr = trivial_term(zc, n, d);
                let l1 = 1.0 / (n as f64 * (eigs[0] - zc));
                (z, plain, plain - corr, (l1 - corr).norm())
            })
            .collect();
        Ok((n, sample, cells))
    })?;
    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend(["n", "e", "eta", "plain_re", "plain_im", "improved_re", "improved_im", "lambda1_term_residual"]);
    let mut table = Table::new("improved_local_law", &head);
    for (n, sample, cells) in &per_sample {
        for &(z, plain, improved, l1) in cells {
            let mut row = provenance(cfg, *sample, &hash);
            row.extend([n.to_string(), num(z.e()), num(z.eta())]);
            row.extend(re_im(plain));
            row.extend(re_im(improved));
            row.push(num(l1));
            table.push(row);
        }
    }
    let mut per_z = Vec::new();
    for &n in &cfg.ns {
        let here: Vec<&Vec<(SpectralParam, C64, C64, f64)>> =
            per_sample.iter().filter(|p| p.0 == n).map(|p| &p.2).collect();
        for (k, z) in cfg.grid.points(n)?.into_iter().enumerate() {
            let plain: Vec<C64> = here.iter().map(|c| c[k].1).collect();
            let improved: Vec<C64> = here.iter().map(|c| c[k].2).collect();
            let st = ResidualStats::of(&improved);
            per_z.push(ImprovedByZ {
                n,
                z,
                samples: here.len(),
                mean_abs_plain: mean(&plain.iter().map(|x| x.norm()).collect::<Vec<_>>()),
                mean_abs_improved: st.mean_abs,
                mean_improved: st.mean,
                std_improved: st.std,
                lambda1_term_residual: here.iter().map(|c| c[k].3).fold(0.0, f64::max),
            });
        }
    }
    let mut summary = Table::new(
        "improved_local_law_by_z",
        &["n", "e", "eta", "samples", "mean_abs_plain", "mean_abs_improved", "mean_improved_re", "mean_improved_im", "std_improved", "lambda1_term_residual"],
    );
    for r in &per_z {
        summary.push(vec![
            r.n.to_string(),
            num(r.z.e()),
            num(r.z.eta()),
            r.samples.to_string(),
            num(r.mean_abs_plain),
            num(r.mean_abs_improved),
            num(r.mean_improved.re),
            num(r.mean_improved.im),
            num(r.std_improved),
            num(r.lambda1_term_residual),
        ]);
    }
    Ok(ImprovedResult {
        per_z,
        tables: vec![table, summary],
    })
}

/// Both defining inequalities of `Ω(z)` at one `z`, with the paper's `ε`
/// and with the practical `ε = C/√(Nη)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub z: SpectralParam,
    pub q: C64,
    pub q_deviation: f64,
    /// Largest `|G_ij - G_ij(Ext(B_r(i, j), Q))|` over the sampled pairs.
    pub entry_max: f64,
    pub eps_paper: f64,
    pub eps_practical: f64,
    pub q_paper: bool,
    pub entries_paper: bool,
    pub q_practical: bool,
    pub entries_practical: bool,
    /// Both inequalities with right-hand sides halved, paper `ε`.
    pub half_paper: bool,
}

impl OmegaReport {
    pub fn member_paper(&self) -> bool {
        self.q_paper && self.entries_paper
    }

    pub fn member_practical(&self) -> bool {
        self.q_practical && self.entries_practical
    }
}

/// Evaluates membership of `g` in `Ω(z)` on the given vertex pairs.
pub fn omega_z_membership(
    g: &RegularGraph,
    sd: &SpectralData,
    z: SpectralParam,
    sched: &Schedule,
    practical_c: f64,
    pairs: &[(usize, usize)],
    radius: usize,
) -> Result<OmegaReport> {
    let q = q_spectral(g, sd, z)?;
    let q_deviation = (q - m_sc(z.z())).norm();
    let base = DeficitGraph::from_regular(g);
    let mut entry_max = 0.0f64;
    for (gij, &(i, j)) in sd.green_entries(pairs, z).into_iter().zip(pairs) {
        entry_max = entry_max.max((gij - ext_entry(&base, g, i, j, radius, q, z)?).norm());
    }
    let kh = z.kappa() + z.eta();
    let eps_paper = sched.error_params(z).eps();
    let eps_practical = practical_c / (g.n() as f64 * z.eta()).sqrt();
    let q_bound = |eps: f64| eps / (kh + eps).sqrt();
    Ok(OmegaReport {
        z,
        q,
        q_deviation,
        entry_max,
        eps_paper,
        eps_practical,
        q_paper: q_deviation <= q_bound(eps_paper),
        entries_paper: entry_max <= eps_paper,
        q_practical: q_deviation <= q_bound(eps_practical),
        entries_practical: entry_max <= eps_practical,
        half_paper: q_deviation <= 0.5 * q_bound(eps_paper) && entry_max <= 0.5 * eps_paper,
    })
}

pub struct OmegaResult {
    /// `(n, sample, tree_like, report)`.
    pub reports: Vec<(usize, usize, bool, OmegaReport)>,
    pub summary: Value,
    pub tables: Vec<Table>,
}

/// `Ω(z)` membership over the grid; pairs have `j ∈ B_2(i)`.
pub fn omega_membership(cfg: &ExperimentConfig) -> Result<OmegaResult> {
    cfg.validate()?;
    let per_sample = map_samples(cfg, |n, sample, g| {
        let sched = cfg.params.schedule(n, cfg.d)?;
        let tree_like = classify_tree_like(g, sched.big_r, cfg.params.omega, cfg.params.c, cfg.params.c_q).in_omega_bar;
        let sd = spectral_decompose(g, cfg.d)?;
        let pairs = entry_pairs(g, cfg.pairs, 2, &mut aux_rng(cfg, n, sample))?;
        cfg.grid
            .points(n)?
            .into_iter()
            .map(|z| {
                let rep = omega_z_membership(g, &sd, z, &sched, cfg.practical_c, &pairs, cfg.entry_radius)?;
                Ok((n, sample, tree_like, rep))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let reports: Vec<(usize, usize, bool, OmegaReport)> = per_sample.into_iter().flatten().collect();
    let hash = cfg.hash();
    let mut head = PROVENANCE.to_vec();
    head.extend([
        "n",
        "e",
        "eta",
        "q_re",
        "q_im",
        "q_deviation",
        "entry_max",
        "eps_paper",
        "eps_practical",
        "member_paper",
        "member_practical",
        "half_paper",
        "tree_like",
    ]);
    let mut table = Table::new("omega_membership", &head);
    for (n, sample, tree_like, r) in &reports {
        let mut row = provenance(cfg, *sample, &hash);
        row.extend([n.to_string(), num(r.z.e()), num(r.z.eta())]);
        row.extend(re_im(r.q));
        row.extend([num(r.q_deviation), num(r.entry_max), num(r.eps_paper), num(r.eps_practical)]);
        row.extend([
            r.member_paper().to_string(),
            r.member_practical().to_string(),
            r.half_paper.to_string(),
            tree_like.to_string(),
        ]);
        table.push(row);
    }
    let per_n: Vec<Value> = cfg
        .ns
        .iter()
        .map(|&n| {
            let here: Vec<&OmegaReport> = reports.iter().filter(|r| r.0 == n).map(|r| &r.3).collect();
            let frac = |f: &dyn Fn(&OmegaReport) -> bool| here.iter().filter(|r| f(r)).count() as f64 / here.len() as f64;
            json!({
                "n": n,
                "cells": here.len(),
                "fraction_member_paper": frac(&|r| r.member_paper()),
                "fraction_member_practical": frac(&|r| r.member_practical()),
                "fraction_half_paper": frac(&|r| r.half_paper),
            })
        })
        .collect();
    Ok(OmegaResult {
        reports,
        summary: json!({ "per_n": per_n }),
        tables: vec![table],
    })
}
