use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, RegularGraph};
use crate::error::{Error, Result};

/// Default cap on the number of pairings tried before giving up.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000_000;

/// Uniformly random simple `d`-regular graph on `n` vertices.
///
/// Pairing model with full rejection: a uniform perfect matching of the `nd`
/// half-edges is drawn and discarded if it has a loop or a repeated edge.
/// Every simple graph arises from exactly `(d!)^n` matchings, so the accepted
/// graph is exactly uniform.
pub fn generate_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_regular_with(n, d, &mut rng, DEFAULT_MAX_ATTEMPTS)
}

pub fn generate_regular_with<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<RegularGraph> {
    if (n * d) % 2 != 0 {
        return Err(Error::InvalidParameters(format!("n·d = {n}·{d} is odd")));
    }
    if n <= d {
        return Err(Error::InvalidParameters(format!("need n > d, got n = {n}, d = {d}")));
    }
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    'attempt: for _ in 0..max_attempts {
        points.shuffle(rng);
        for row in adj.iter_mut() {
            row.clear();
        }
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u].contains(&v) {
                continue 'attempt;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut graph = Graph::empty(n);
        for (u, row) in adj.iter_mut().enumerate() {
            row.sort_unstable();
            graph.adj[u] = row.clone();
        }
        return RegularGraph::new(graph, d);
    }
    Err(Error::RejectionBudget {
        n,
        d,
        attempts: max_attempts,
    })
}
