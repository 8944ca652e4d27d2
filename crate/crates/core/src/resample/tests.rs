use super::*;
use crate::graph::{generate_regular, Neighborhood};

fn ball_edges(g: &RegularGraph, o: usize, ell: usize) -> Vec<(usize, usize)> {
    let nb: Neighborhood = ball(g, &[o], ell).unwrap();
    let mut e: Vec<(usize, usize)> = nb
        .graph
        .edges()
        .into_iter()
        .map(|(u, v)| (nb.ids[u].min(nb.ids[v]), nb.ids[u].max(nb.ids[v])))
        .collect();
    e.sort_unstable();
    e
}

#[test]
fn boundary_of_tree_ball() {
    let mut found = 0;
    for seed in 0..40 {
        let g = generate_regular(200, 3, seed).unwrap();
        let nb = ball(&g, &[0], 3).unwrap();
        if excess(&nb.graph) == 0 {
            let data = sample_resampling_data_seeded(&g, 0, 2, seed).unwrap();
            assert_eq!(data.mu(), 3 * 2 * 2);
            let mut sorted = data.boundary.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, data.boundary);
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn draws_avoid_ball() {
    let g = generate_regular(50, 3, 1).unwrap();
    let data = sample_resampling_data_seeded(&g, 7, 1, 3).unwrap();
    let inside = ball_mask(&g, 7, 1).unwrap();
    for &(b, c) in &data.draws {
        assert!(g.has_edge(b, c) && !inside[b] && !inside[c]);
    }
    assert!(data.validate(&g).is_ok());
    let json = data.to_json();
    assert!(json.contains("\"boundary\":[["));
    assert_eq!(ResamplingData::from_json(&json).unwrap(), data);
    let aliased = json.replace("\"ell\"", "\"ℓ\"");
    assert_eq!(ResamplingData::from_json(&aliased).unwrap(), data);
}

#[test]
fn covering_ball_is_rejected() {
    let k4 = RegularGraph::from_edges(4, 3, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    assert!(sample_resampling_data_seeded(&k4, 0, 1, 0).is_err());
}

#[test]
fn indicator_examples() {
    let g = generate_regular(100, 3, 11).unwrap();
    let base = sample_resampling_data_seeded(&g, 0, 1, 5).unwrap();
    let (_, a) = base.boundary[0];
    let inside = ball_mask(&g, 0, 1).unwrap();

    // b adjacent to a: adding {a, b} would double an edge
    let b = *g.neighbors(a).iter().find(|&&w| !inside[w]).unwrap();
    let c = *g.neighbors(b).iter().find(|&&w| !inside[w]).unwrap();
    let mut data = base.clone();
    data.draws[0] = (b, c);
    let ind = indicators(&g, &data, 8).unwrap();
    assert!(!ind.i[0]);

    // shared b: both lose isolation
    let mut data = base.clone();
    data.draws[1] = data.draws[0];
    let ind = indicators(&g, &data, 4).unwrap();
    assert!(!ind.j[0] && !ind.j[1]);

    // inconsistent data is rejected
    let mut bad = base.clone();
    bad.draws[0] = (0, g.neighbors(0)[0]);
    assert!(indicators(&g, &bad, 4).is_err());
}

#[test]
fn empty_admissible_set_is_identity() {
    let g = generate_regular(40, 3, 2).unwrap();
    let mut data = sample_resampling_data_seeded(&g, 0, 1, 2).unwrap();
    let shared = data.draws[0];
    for dr in data.draws.iter_mut() {
        *dr = shared;
    }
    let res = apply_resampling(&g, &data, 4).unwrap();
    assert!(res.admissible.is_empty());
    assert_eq!(res.graph, g);
    assert_eq!(res.switched_data, data);
}

#[test]
fn involution_and_local_invariance() {
    let mut switched = 0;
    for seed in 0..300u64 {
        let n = if seed % 2 == 0 { 50 } else { 200 };
        let g = generate_regular(n, 3, seed).unwrap();
        let o = (seed as usize * 13) % n;
        let data = sample_resampling_data_seeded(&g, o, 1, seed + 1000).unwrap();
        let big_r = 4 + (seed as usize % 3) * 4;
        let res = apply_resampling(&g, &data, big_r).unwrap();
        switched += res.admissible.len();
        assert!((0..n).all(|v| res.graph.degree(v) == 3));
        assert_eq!(ball_edges(&g, o, 1), ball_edges(&res.graph, o, 1));
        let back = apply_resampling(&res.graph, &res.switched_data, big_r).unwrap();
        assert_eq!(back.admissible, res.admissible);
        assert_eq!(back.graph, g);
        assert_eq!(back.switched_data, data);
        for (k, &v) in res.new_boundary.iter().enumerate() {
            assert_eq!(res.switched_data.boundary[k].1, v);
        }
    }
    assert!(switched > 0);
}
