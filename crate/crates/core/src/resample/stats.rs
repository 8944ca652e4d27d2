//! Monte Carlo checks that resampling preserves the uniform measure and
//! produces an exchangeable pair, against the exact class distribution.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{apply_resampling, ball_mask, indicators_unchecked, sample_resampling_data, switch_all, switch_radius};
use crate::error::{Error, Result};
use crate::graph::{canonical_form, class_distribution, generate_regular_with, ClassDistribution, RegularGraph};

/// Which map is applied to each sampled `(G, 𝐒)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchMode {
    /// The local resampling.
    Switch,
    /// Leave `G` unchanged (baseline).
    Identity,
    /// Switch every index with `I_α = 1`, ignoring isolation; switches that
    /// no longer apply are skipped. Not measure preserving in general.
    IgnoreIsolation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
}

fn p_value(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(statistic)
}

/// Pearson goodness of fit of `observed` counts against `probs`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquareReport {
    let total: u64 = observed.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * total as f64).collect();
    let statistic = observed
        .iter()
        .zip(&expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = probs.iter().filter(|&&p| p > 0.0).count().saturating_sub(1);
    ChiSquareReport {
        statistic,
        dof,
        p_value: p_value(statistic, dof),
        observed: observed.to_vec(),
        expected,
    }
}

/// Bowker symmetry test of a square table `table[i][j]` against its
/// transpose, pooled over the off-diagonal pairs `i < j` that occur.
/// `observed`/`expected` list `n_ij` and `(n_ij + n_ji)/2` per pair.
pub fn bowker_test(table: &[Vec<u64>]) -> ChiSquareReport {
    let k = table.len();
    let mut statistic = 0.0;
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (table[i][j], table[j][i]);
            if a + b > 0 {
                statistic += (a as f64 - b as f64).powi(2) / (a + b) as f64;
                observed.push(a);
                expected.push((a + b) as f64 / 2.0);
            }
        }
    }
    let dof = observed.len();
    ChiSquareReport {
        statistic,
        dof,
        p_value: p_value(statistic, dof),
        observed,
        expected,
    }
}

fn resample_with_mode(g: &RegularGraph, rng: &mut ChaCha8Rng, ell: usize, big_r: usize, mode: SwitchMode) -> Result<RegularGraph> {
    let data = sample_resampling_data(g, 0, ell, rng)?;
    match mode {
        SwitchMode::Identity => Ok(g.clone()),
        SwitchMode::Switch => Ok(apply_resampling(g, &data, big_r)?.graph),
        SwitchMode::IgnoreIsolation => {
            let inside = ball_mask(g, data.o, data.ell)?;
            let ind = indicators_unchecked(g, &data, &inside, switch_radius(big_r));
            let mut out = g.clone();
            for k in (0..data.mu()).filter(|&k| ind.i[k]) {
                if let Ok(next) = switch_all(&out, &data, std::iter::once(k)) {
                    out = next;
                }
            }
            Ok(out)
        }
    }
}

fn class_of(dist: &ClassDistribution, g: &RegularGraph) -> Result<usize> {
    dist.index_of(&canonical_form(g)?)
        .ok_or_else(|| Error::InvalidGraph("resampled graph is not in the enumerated class list".into()))
}

/// Per-trial `(class(G), class(T_𝐒(G)))` with `G` uniform, `𝐒` uniform.
#[allow(clippy::too_many_arguments)]
fn sample_pairs(
    n: usize,
    d: usize,
    ell: usize,
    big_r: usize,
    trials: usize,
    seed: u64,
    mode: SwitchMode,
    dist: &ClassDistribution,
) -> Result<Vec<(usize, usize)>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let g = generate_regular_with(n, d, &mut rng, crate::graph::DEFAULT_MAX_ATTEMPTS)?;
            let h = resample_with_mode(&g, &mut rng, ell, big_r, mode)?;
            Ok((class_of(dist, &g)?, class_of(dist, &h)?))
        })
        .collect()
}

/// Chi-square of the isomorphism classes of `T_𝐒(G)` against the exact
/// class distribution of uniform labeled graphs. Resampling is centered at
/// vertex 0.
pub fn measure_preservation_test(
    n: usize,
    d: usize,
    ell: usize,
    big_r: usize,
    trials: usize,
    seed: u64,
    mode: SwitchMode,
) -> Result<ChiSquareReport> {
    let dist = class_distribution(n, d)?;
    let pairs = sample_pairs(n, d, ell, big_r, trials, seed, mode, &dist)?;
    let mut counts = vec![0u64; dist.classes.len()];
    for &(_, h) in &pairs {
        counts[h] += 1;
    }
    Ok(chi_square_gof(&counts, &dist.probabilities()))
}

/// Bowker test of the joint class table of `(G, T_𝐒(G))` against its
/// transpose.
pub fn exchangeability_test(
    n: usize,
    d: usize,
    ell: usize,
    big_r: usize,
    trials: usize,
    seed: u64,
    mode: SwitchMode,
) -> Result<ChiSquareReport> {
    let dist = class_distribution(n, d)?;
    let pairs = sample_pairs(n, d, ell, big_r, trials, seed, mode, &dist)?;
    let k = dist.classes.len();
    let mut table = vec![vec![0u64; k]; k];
    for &(a, b) in &pairs {
        table[a][b] += 1;
    }
    Ok(bowker_test(&table))
}
