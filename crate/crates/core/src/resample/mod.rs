//! Local resampling around a center vertex: the boundary of `B_ℓ(o)` is
//! switched with independently drawn far-away edges wherever the switch is
//! admissible.
//!
//! For boundary edge `(l, a)` and drawn edge `(b, c)`, the switch replaces
//! `{l, a}, {b, c}` by `{l, c}, {a, b}` and the data by `(l, c), (b, a)`.
//! Applying the switched data to the switched graph restores both.

mod stats;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ball, components, excess, Adjacency, Graph, RegularGraph};

pub use stats::{
    bowker_test, chi_square_gof, exchangeability_test, measure_preservation_test, ChiSquareReport, SwitchMode,
};

/// Boundary edges of the ball and one drawn oriented edge per boundary edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplingData {
    pub o: usize,
    #[serde(alias = "ℓ")]
    pub ell: usize,
    /// `(l_α, a_α)`: `l_α` in the ball, `a_α` outside.
    pub boundary: Vec<(usize, usize)>,
    /// `(b_α, c_α)`: oriented edges with both endpoints outside the ball.
    pub draws: Vec<(usize, usize)>,
}

impl ResamplingData {
    pub fn mu(&self) -> usize {
        self.boundary.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("resampling data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Check that the boundary is exactly the edge boundary of `B_ℓ(o, g)`
    /// (in any order) and that every draw is an oriented edge avoiding it.
    pub fn validate(&self, g: &RegularGraph) -> Result<()> {
        let n = g.n();
        if self.o >= n {
            return Err(Error::VertexOutOfRange { vertex: self.o, n });
        }
        if self.draws.len() != self.boundary.len() {
            return Err(Error::InconsistentData(format!(
                "{} boundary edges but {} draws",
                self.boundary.len(),
                self.draws.len()
            )));
        }
        let inside = ball_mask(g, self.o, self.ell)?;
        let mut given = self.boundary.clone();
        given.sort_unstable();
        if given != boundary_edges_masked(g, &inside) {
            return Err(Error::InconsistentData("boundary does not match the ball boundary".into()));
        }
        for &(b, c) in &self.draws {
            if b >= n || c >= n || !g.has_edge(b, c) || inside[b] || inside[c] {
                return Err(Error::InconsistentData(format!(
                    "({b}, {c}) is not an edge outside the ball"
                )));
            }
        }
        Ok(())
    }
}

fn ball_mask(g: &RegularGraph, o: usize, ell: usize) -> Result<Vec<bool>> {
    let nb = ball(g, &[o], ell)?;
    let mut inside = vec![false; g.n()];
    for &v in &nb.ids {
        inside[v] = true;
    }
    Ok(inside)
}

fn boundary_edges_masked(g: &RegularGraph, inside: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in 0..g.n() {
        if inside[l] {
            for &a in g.neighbors(l) {
                if !inside[a] {
                    out.push((l, a));
                }
            }
        }
    }
    out
}

/// Edge boundary of `B_ℓ(o)` oriented outward, sorted by `(l, a)`.
pub fn boundary_edges(g: &RegularGraph, o: usize, ell: usize) -> Result<Vec<(usize, usize)>> {
    Ok(boundary_edges_masked(g, &ball_mask(g, o, ell)?))
}

/// Draw resampling data: the sorted boundary and, for each boundary edge,
/// an independent uniform oriented edge of `G^{(𝕋)}`.
pub fn sample_resampling_data<R: Rng + ?Sized>(
    g: &RegularGraph,
    o: usize,
    ell: usize,
    rng: &mut R,
) -> Result<ResamplingData> {
    let inside = ball_mask(g, o, ell)?;
    if inside.iter().all(|&x| x) {
        return Err(Error::InvalidParameters(format!(
            "the radius-{ell} ball around {o} covers the whole graph"
        )));
    }
    let mut oriented = Vec::new();
    for u in 0..g.n() {
        if !inside[u] {
            for &v in g.neighbors(u) {
                if !inside[v] {
                    oriented.push((u, v));
                }
            }
        }
    }
    if oriented.is_empty() {
        return Err(Error::InvalidParameters("no edge lies outside the ball".into()));
    }
    let boundary = boundary_edges_masked(g, &inside);
    let draws = (0..boundary.len())
        .map(|_| oriented[rng.random_range(0..oriented.len())])
        .collect();
    Ok(ResamplingData {
        o,
        ell,
        boundary,
        draws,
    })
}

pub fn sample_resampling_data_seeded(g: &RegularGraph, o: usize, ell: usize, seed: u64) -> Result<ResamplingData> {
    sample_resampling_data(g, o, ell, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Radius of the balls in the admissibility conditions: `⌊R/4⌋`.
pub fn switch_radius(big_r: usize) -> usize {
    big_r / 4
}

/// BFS distances in `G^{(𝕋)}` from `sources`, stopping at depth `limit`.
/// Returns the visited vertices with their distances.
fn bfs_outside<A: Adjacency + ?Sized>(
    g: &A,
    inside: &[bool],
    sources: &[usize],
    limit: usize,
    dist: &mut [usize],
) -> Vec<usize> {
    let mut seen = Vec::new();
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            seen.push(s);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] == limit {
            continue;
        }
        for &w in g.neighbors(u) {
            if !inside[w] && dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                seen.push(w);
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Per-index admissibility: `I_α` (tree condition) and `J_α` (isolation).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indicators {
    pub i: Vec<bool>,
    pub j: Vec<bool>,
}

impl Indicators {
    pub fn admissible(&self) -> Vec<usize> {
        (0..self.i.len()).filter(|&k| self.i[k] && self.j[k]).collect()
    }
}

/// `I_α = 1` iff `B_ρ({a, b, c}, G^{(𝕋)})` plus the edge `{a, b}` is a tree;
/// `J_α = 1` iff every other triple is at distance more than `ρ` in
/// `G^{(𝕋)}`, where `ρ = ⌊R/4⌋`.
pub fn indicators(g: &RegularGraph, data: &ResamplingData, big_r: usize) -> Result<Indicators> {
    data.validate(g)?;
    let inside = ball_mask(g, data.o, data.ell)?;
    Ok(indicators_unchecked(g, data, &inside, switch_radius(big_r)))
}

fn indicators_unchecked(g: &RegularGraph, data: &ResamplingData, inside: &[bool], rho: usize) -> Indicators {
    let mu = data.mu();
    let n = g.n();
    let triples: Vec<[usize; 3]> = (0..mu)
        .map(|k| [data.boundary[k].1, data.draws[k].0, data.draws[k].1])
        .collect();
    let mut dist = vec![usize::MAX; n];
    let mut owner: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, t) in triples.iter().enumerate() {
        for &v in t {
            if owner[v].last() != Some(&k) {
                owner[v].push(k);
            }
        }
    }
    let mut ind_i = vec![false; mu];
    let mut ind_j = vec![true; mu];
    for (k, &[a, b, c]) in triples.iter().enumerate() {
        let seen = bfs_outside(g, inside, &[a, b, c], rho, &mut dist);
        for &v in &seen {
            if owner[v].iter().any(|&other| other != k) {
                ind_j[k] = false;
            }
        }
        ind_i[k] = a != b && a != c && !g.has_edge(a, b) && {
            let mut local = Graph::induced(g, &seen);
            let la = seen.iter().position(|&v| v == a).unwrap();
            let lb = seen.iter().position(|&v| v == b).unwrap();
            local.add_edge(la, lb).is_ok() && components(&local) == 1 && excess(&local) == 0
        };
        for &v in &seen {
            dist[v] = usize::MAX;
        }
    }
    Indicators { i: ind_i, j: ind_j }
}

/// Outcome of one local resampling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchResult {
    pub graph: RegularGraph,
    /// Admissible indices, ascending.
    pub admissible: Vec<usize>,
    pub indicators: Indicators,
    pub switched_data: ResamplingData,
    /// New outer endpoint of each boundary edge: `c_α` if switched, else `a_α`.
    pub new_boundary: Vec<usize>,
}

fn switched_data(data: &ResamplingData, admissible: &[usize]) -> ResamplingData {
    let mut out = data.clone();
    for &k in admissible {
        let (l, a) = data.boundary[k];
        let (b, c) = data.draws[k];
        out.boundary[k] = (l, c);
        out.draws[k] = (b, a);
    }
    out
}

fn switch_all(g: &RegularGraph, data: &ResamplingData, order: impl Iterator<Item = usize>) -> Result<RegularGraph> {
    let mut out = g.clone();
    for k in order {
        let (l, a) = data.boundary[k];
        let (b, c) = data.draws[k];
        out = out.simple_switch(l, a, b, c)?;
    }
    Ok(out)
}

/// Apply every admissible switch, in ascending index order.
pub fn apply_resampling(g: &RegularGraph, data: &ResamplingData, big_r: usize) -> Result<SwitchResult> {
    data.validate(g)?;
    let inside = ball_mask(g, data.o, data.ell)?;
    let indicators = indicators_unchecked(g, data, &inside, switch_radius(big_r));
    let admissible = indicators.admissible();
    let graph = switch_all(g, data, admissible.iter().copied()).map_err(|e| {
        Error::SwitchPrecondition(format!("admissible switch failed to apply: {e}"))
    })?;
    debug_assert_eq!(
        switch_all(g, data, admissible.iter().rev().copied()).ok().as_ref(),
        Some(&graph),
        "admissible switches do not commute"
    );
    let new_boundary = (0..data.mu())
        .map(|k| {
            if admissible.binary_search(&k).is_ok() {
                data.draws[k].1
            } else {
                data.boundary[k].1
            }
        })
        .collect();
    Ok(SwitchResult {
        graph,
        switched_data: switched_data(data, &admissible),
        admissible,
        indicators,
        new_boundary,
    })
}

#[cfg(test)]
mod tests;
