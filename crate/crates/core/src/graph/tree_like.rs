//! Tree-like classification: how far radius-`R` neighborhoods are from trees.

use serde::{Deserialize, Serialize};

use super::{Adjacency, RegularGraph};

/// Excess statistics of all radius-`R` balls and the resulting verdicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeLikeReport {
    pub radius: usize,
    /// Max excess over all radius-`R` balls.
    pub max_excess: usize,
    /// Vertices whose radius-`R` ball contains a cycle.
    pub cycle_vertices: usize,
    /// Max excess over radius-`⌊R/8⌋` balls.
    pub max_excess_eighth: usize,
    /// Max excess over radius-`⌊R/2⌋` balls.
    pub max_excess_half: usize,
    pub in_omega_bar: bool,
    pub in_omega_bar_plus: bool,
}

/// Classify `g` against the radius-`R` tree-like conditions.
///
/// `Ω̄`: every radius-`R` ball has excess at most `omega`, and at most
/// `N^c` vertices see a cycle within distance `R`.
/// `Ω̄⁺`: radius-`R/8` balls have excess at most `omega`, radius-`R/2` balls
/// at most `c_q`, and at most `2N^c` vertices see a cycle within distance `R`.
pub fn classify_tree_like(g: &RegularGraph, r: usize, omega: usize, c: f64, c_q: usize) -> TreeLikeReport {
    let n = g.n();
    let radii = [r, r / 8, r / 2];
    let mut max = [0usize; 3];
    let mut cycle_vertices = 0;
    let mut dist = vec![usize::MAX; n];
    let mut visited = Vec::new();
    for s in 0..n {
        let ex = ball_excesses(g, s, &radii, &mut dist, &mut visited);
        for k in 0..3 {
            max[k] = max[k].max(ex[k]);
        }
        if ex[0] > 0 {
            cycle_vertices += 1;
        }
    }
    let budget = (n as f64).powf(c);
    TreeLikeReport {
        radius: r,
        max_excess: max[0],
        cycle_vertices,
        max_excess_eighth: max[1],
        max_excess_half: max[2],
        in_omega_bar: max[0] <= omega && cycle_vertices as f64 <= budget,
        in_omega_bar_plus: max[1] <= omega && max[2] <= c_q && cycle_vertices as f64 <= 2.0 * budget,
    }
}

/// Excess of `B_t(s)` for each `t` in `radii`, from one BFS. A ball is
/// connected, so its excess is `E - V + 1`; an edge lies in `B_t` iff both
/// endpoints are within distance `t`.
fn ball_excesses<A: Adjacency + ?Sized>(
    g: &A,
    s: usize,
    radii: &[usize; 3],
    dist: &mut [usize],
    visited: &mut Vec<usize>,
) -> [usize; 3] {
    let reach = *radii.iter().max().unwrap();
    visited.clear();
    dist[s] = 0;
    visited.push(s);
    let mut head = 0;
    while head < visited.len() {
        let u = visited[head];
        head += 1;
        if dist[u] == reach {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                visited.push(w);
            }
        }
    }
    let mut vertices = [0usize; 3];
    let mut edges = [0usize; 3];
    for &u in visited.iter() {
        for k in 0..3 {
            if dist[u] <= radii[k] {
                vertices[k] += 1;
            }
        }
        for &w in g.neighbors(u) {
            if u < w && dist[w] != usize::MAX {
                let far = dist[u].max(dist[w]);
                for k in 0..3 {
                    if far <= radii[k] {
                        edges[k] += 1;
                    }
                }
            }
        }
    }
    for &u in visited.iter() {
        dist[u] = usize::MAX;
    }
    [0, 1, 2].map(|k| edges[k] + 1 - vertices[k])
}
