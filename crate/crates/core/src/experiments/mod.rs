//! Desk-scale experiments. Each one maps `(N, sample)` work items in
//! parallel and writes fixed-header CSV tables plus a JSON summary.

mod config;
mod local;
mod spectra;
mod table;

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::RegularGraph;

pub use config::{ExperimentConfig, GridSpec};
pub use local::{
    entry_pairs, improved_local_law, local_law, omega_membership, omega_z_membership, self_consistent,
    ImprovedByZ, ImprovedResult, LocalLawRecord, LocalLawResult, OmegaReport, OmegaResult, ResidualStats,
    SelfConsistentResult, SelfConsistentSample,
};
pub use spectra::{
    bulk_range, delocalization, extremal, km_fit, ks_distance, rigidity, sample_spectra, DelocalizationResult,
    DelocalizationSample, ExtremalByN, ExtremalResult, ExtremalSample, KsResult, RigidityByN, RigidityResult,
    RigiditySample, RigiditySummary, SpectrumSample, EDGE_CUT, EXCEEDANCE_GRID,
};
pub use table::{num, Table};

/// Experiment names accepted by [`run_experiment`].
pub const EXPERIMENTS: [&str; 8] = [
    "rigidity",
    "extremal",
    "delocalization",
    "local-law",
    "self-consistent",
    "improved-local-law",
    "km-fit",
    "omega-membership",
];

/// Leading columns of every table.
pub(crate) const PROVENANCE: [&str; 3] = ["seed", "sample", "config_hash"];

pub(crate) fn provenance(cfg: &ExperimentConfig, sample: usize, hash: &str) -> Vec<String> {
    vec![cfg.seed.to_string(), sample.to_string(), hash.to_string()]
}

/// Samples every `(n, sample)` graph and applies `f`, in parallel, keeping
/// the output in work-item order.
pub(crate) fn map_samples<T, F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, usize, &RegularGraph) -> Result<T> + Sync,
{
    cfg.work_items()
        .into_par_iter()
        .map(|(n, s)| {
            let g = cfg.sample_graph(n, s)?;
            f(n, s, &g)
        })
        .collect()
}

/// Stream for auxiliary randomness (vertex pairs), disjoint from the graph
/// streams.
pub(crate) fn aux_rng(cfg: &ExperimentConfig, n: usize, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(((n as u64) << 32) | sample as u64);
    rng
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// distinct abscissae.
pub(crate) fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Tables and summary of one run.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub name: String,
    pub tables: Vec<Table>,
    pub summary: Value,
}

impl ExperimentOutput {
    /// Writes every table and `<name>_summary.json` into `dir`, returning
    /// the paths in write order.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for t in &self.tables {
            paths.push(t.write(dir)?);
        }
        let path = dir.join(format!("{}_summary.json", self.name.replace('-', "_")));
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        paths.push(path);
        Ok(paths)
    }
}

/// Runs the named experiment.
pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let echo = |result: Value| {
        json!({
            "experiment": name,
            "config": cfg,
            "config_hash": cfg.hash(),
            "result": result,
        })
    };
    let (tables, summary) = match name {
        "rigidity" => {
            let r = rigidity(cfg, &sample_spectra(cfg)?)?;
            (r.tables, echo(serde_json::to_value(&r.summary)?))
        }
        "extremal" => {
            let r = extremal(cfg, &sample_spectra(cfg)?);
            (r.tables, echo(serde_json::to_value(&r.per_n)?))
        }
        "delocalization" => {
            let r = delocalization(cfg)?;
            let per_n: Vec<Value> = r
                .per_n
                .iter()
                .map(|&(n, m)| json!({"n": n, "max_s": m, "five_log_n": 5.0 * (n as f64).ln()}))
                .collect();
            (r.tables, echo(Value::Array(per_n)))
        }
        "km-fit" => {
            let r = km_fit(cfg, &sample_spectra(cfg)?);
            let per_n: Vec<Value> = r.per_n.iter().map(|&(n, ks)| json!({"n": n, "mean_ks": ks})).collect();
            (r.tables, echo(Value::Array(per_n)))
        }
        "local-law" => {
            let r = local_law(cfg)?;
            (r.tables, echo(r.summary))
        }
        "self-consistent" => {
            let r = self_consistent(cfg)?;
            let summary = echo(r.summary());
            (r.tables, summary)
        }
        "improved-local-law" => {
            let r = improved_local_law(cfg)?;
            (r.tables, echo(serde_json::to_value(&r.per_z)?))
        }
        "omega-membership" => {
            let r = omega_membership(cfg)?;
            (r.tables, echo(r.summary))
        }
        _ => {
            return Err(Error::InvalidParameters(format!(
                "unknown experiment {name:?}; expected one of {}",
                EXPERIMENTS.join(", ")
            )))
        }
    };
    Ok(ExperimentOutput {
        name: name.to_string(),
        tables,
        summary,
    })
}
