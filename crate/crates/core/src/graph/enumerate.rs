//! Exhaustive enumeration of labeled simple `d`-regular graphs.
//!
//! Only feasible for very small `n`; it is the exact reference distribution
//! for the uniformity and measure-preservation tests.

use std::collections::BTreeMap;

use super::{canonical_form, Graph, RegularGraph};
use crate::error::{Error, Result};

/// Call `f` once for every labeled simple `d`-regular graph on `0..n`.
pub fn for_each_labeled_regular<F: FnMut(&RegularGraph)>(n: usize, d: usize, mut f: F) -> Result<()> {
    if (n * d) % 2 != 0 || n <= d {
        return Err(Error::InvalidParameters(format!("no {d}-regular graphs on {n} vertices")));
    }
    let mut g = Graph::empty(n);
    fill(&mut g, d, 0, &mut f);
    Ok(())
}

fn fill<F: FnMut(&RegularGraph)>(g: &mut Graph, d: usize, from: usize, f: &mut F) {
    let n = g.adj.len();
    let Some(u) = (from..n).find(|&u| g.adj[u].len() < d) else {
        f(&RegularGraph { graph: g.clone(), d });
        return;
    };
    let need = d - g.adj[u].len();
    // vertices below u are already saturated
    let candidates: Vec<usize> = (u + 1..n).filter(|&w| g.adj[w].len() < d).collect();
    if candidates.len() < need {
        return;
    }
    let mut chosen = Vec::with_capacity(need);
    choose(g, d, u, &candidates, 0, need, &mut chosen, f);
}

#[allow(clippy::too_many_arguments)]
fn choose<F: FnMut(&RegularGraph)>(
    g: &mut Graph,
    d: usize,
    u: usize,
    candidates: &[usize],
    start: usize,
    need: usize,
    chosen: &mut Vec<usize>,
    f: &mut F,
) {
    if chosen.len() == need {
        for &w in chosen.iter() {
            g.add_edge(u, w).expect("fresh edge");
        }
        fill(g, d, u + 1, f);
        for &w in chosen.iter() {
            g.remove_edge(u, w).expect("edge just added");
        }
        return;
    }
    let remaining = need - chosen.len();
    for k in start..=candidates.len() - remaining {
        chosen.push(candidates[k]);
        choose(g, d, u, candidates, k + 1, need, chosen, f);
        chosen.pop();
    }
}

/// Labeled-graph counts per isomorphism class; under the uniform measure on
/// labeled graphs a class has probability `count / total`.
#[derive(Clone, Debug)]
pub struct ClassDistribution {
    /// Canonical forms, sorted.
    pub classes: Vec<Vec<u8>>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ClassDistribution {
    pub fn index_of(&self, canon: &[u8]) -> Option<usize> {
        self.classes.binary_search_by(|c| c.as_slice().cmp(canon)).ok()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

pub fn class_distribution(n: usize, d: usize) -> Result<ClassDistribution> {
    let mut map: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut failure = None;
    for_each_labeled_regular(n, d, |g| match canonical_form(g) {
        Ok(c) => *map.entry(c).or_default() += 1,
        Err(e) => failure = Some(e),
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let total = map.values().sum();
    let (classes, counts) = map.into_iter().unzip();
    Ok(ClassDistribution {
        classes,
        counts,
        total,
    })
}
