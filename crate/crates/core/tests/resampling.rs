//! Statistical behaviour of uniform generation and local resampling on small
//! graphs, where the exact class distribution is known by enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrg_core::graph::{ball, canonical_form, class_distribution, generate_regular, generate_regular_with, DEFAULT_MAX_ATTEMPTS};
use rrg_core::resample::{
    apply_resampling, chi_square_gof, exchangeability_test, measure_preservation_test, sample_resampling_data,
    sample_resampling_data_seeded, SwitchMode,
};
use rrg_core::scalar::ParameterSet;
use rrg_core::{Adjacency, RegularGraph};

const P_MIN: f64 = 1e-3;
const TRIALS: usize = 100_000;

#[test]
fn enumeration_counts_cubic_graphs_on_eight_vertices() {
    let dist = class_distribution(8, 3).unwrap();
    assert_eq!(dist.classes.len(), 6);
    assert_eq!(dist.total, 19355);
}

#[test]
fn generator_is_uniform_on_eight_vertices() {
    let dist = class_distribution(8, 3).unwrap();
    let mut counts = vec![0u64; dist.classes.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..TRIALS {
        let g = generate_regular_with(8, 3, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
        counts[dist.index_of(&canonical_form(&g).unwrap()).unwrap()] += 1;
    }
    let report = chi_square_gof(&counts, &dist.probabilities());
    assert!(report.p_value > P_MIN, "{report:?}");
}

/// Fraction of trials in which at least one switch is admissible.
fn switch_rate(ell: usize, big_r: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 2000;
    let mut hits = 0;
    for _ in 0..trials {
        let g = generate_regular_with(8, 3, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
        let data = sample_resampling_data(&g, 0, ell, &mut rng).unwrap();
        if !apply_resampling(&g, &data, big_r).unwrap().admissible.is_empty() {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

// At n = 8 only ℓ = 0 leaves room for admissible switches: for ℓ = 1 at most
// four vertices lie outside the ball and every pair of triples overlaps.
const ELL: usize = 0;
const BIG_R: usize = 1;

#[test]
fn resampling_preserves_the_uniform_measure() {
    // the test only has power if switches actually happen
    assert!(switch_rate(ELL, BIG_R) > 0.02);
    assert_eq!(switch_rate(1, BIG_R), 0.0);
    let report = measure_preservation_test(8, 3, ELL, BIG_R, TRIALS, 23, SwitchMode::Switch).unwrap();
    assert!(report.p_value > P_MIN, "{report:?}");
    let baseline = measure_preservation_test(8, 3, ELL, BIG_R, TRIALS, 5, SwitchMode::Identity).unwrap();
    assert!(baseline.p_value > P_MIN, "{baseline:?}");
    let control = measure_preservation_test(8, 3, ELL, BIG_R, TRIALS, 29, SwitchMode::IgnoreIsolation).unwrap();
    // switching without the isolation condition is visibly biased
    assert!(control.p_value < P_MIN, "{control:?}");
}

#[test]
fn resampled_pair_is_exchangeable() {
    let report = exchangeability_test(8, 3, ELL, BIG_R, TRIALS, 41, SwitchMode::Switch).unwrap();
    assert!(report.dof > 0);
    assert!(report.p_value > P_MIN, "{report:?}");
}

#[test]
fn draws_are_spread_over_vertices() {
    let n = 200;
    let g = generate_regular(n, 3, 1).unwrap();
    let mut hits = vec![0u64; n];
    let trials = 20_000u64;
    for seed in 0..trials {
        let data = sample_resampling_data_seeded(&g, 0, 1, seed).unwrap();
        hits[data.draws[0].0] += 1;
    }
    let cap = 2.0 / n as f64;
    // 6σ slack above the cap on the empirical frequency
    let slack = 6.0 * (cap / trials as f64).sqrt();
    for (v, &h) in hits.iter().enumerate() {
        assert!((h as f64 / trials as f64) <= cap + slack, "vertex {v}: {h}");
    }
}

#[test]
fn almost_every_switch_is_admissible_on_large_graphs() {
    let n = 2000;
    let sched = ParameterSet::default().schedule(n, 3).unwrap();
    let mut rejected = Vec::new();
    for seed in 0..41u64 {
        let g = generate_regular(n, 3, 100 + seed).unwrap();
        let data = sample_resampling_data_seeded(&g, (seed as usize * 37) % n, 1, seed).unwrap();
        let res = apply_resampling(&g, &data, sched.big_r).unwrap();
        rejected.push(data.mu() - res.admissible.len());
    }
    rejected.sort_unstable();
    assert_eq!(rejected[rejected.len() / 2], 0, "{rejected:?}");
}

fn ball_edge_set(g: &RegularGraph, o: usize, ell: usize) -> Vec<(usize, usize)> {
    let nb = ball(g, &[o], ell).unwrap();
    let mut out: Vec<(usize, usize)> = nb
        .graph
        .edges()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (nb.ids[a], nb.ids[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    out.sort_unstable();
    out
}

#[test]
fn involution_on_ten_thousand_samples() {
    let mut switched = 0usize;
    for t in 0..10_000u64 {
        let n = if t % 2 == 0 { 50 } else { 200 };
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let g = generate_regular_with(n, 3, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
        let o = (t as usize * 7) % n;
        let ell = 1 + (t as usize / 2) % 2;
        let big_r = [1, 4, 8][(t as usize / 4) % 3];
        let data = sample_resampling_data(&g, o, ell, &mut rng).unwrap();
        let res = apply_resampling(&g, &data, big_r).unwrap();
        switched += res.admissible.len();
        assert!((0..n).all(|v| res.graph.degree(v) == 3));
        assert_eq!(res.graph.edges().len(), 3 * n / 2);
        assert_eq!(ball_edge_set(&g, o, ell), ball_edge_set(&res.graph, o, ell));
        let back = apply_resampling(&res.graph, &res.switched_data, big_r).unwrap();
        assert_eq!(back.admissible, res.admissible, "trial {t}");
        assert_eq!(back.graph, g, "trial {t}");
        assert_eq!(back.switched_data, data, "trial {t}");
    }
    assert!(switched > 10_000, "{switched}");
}
