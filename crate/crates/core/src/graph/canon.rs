//! Canonical labeling of small graphs by individualization-refinement.
//!
//! The search tree (equitable refinement, then branching on every vertex of
//! the first non-singleton cell) is built only from isomorphism-invariant
//! choices, so the lexicographically smallest adjacency string over its
//! leaves is a complete invariant.

use super::Adjacency;
use crate::error::{Error, Result};

pub const DEFAULT_CANON_CAP: usize = 12;

/// Canonical byte string of `g`: equal iff the graphs are isomorphic.
pub fn canonical_form<A: Adjacency + ?Sized>(g: &A) -> Result<Vec<u8>> {
    canonical_form_with_cap(g, DEFAULT_CANON_CAP)
}

pub fn canonical_form_with_cap<A: Adjacency + ?Sized>(g: &A, cap: usize) -> Result<Vec<u8>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::CanonCapExceeded { n, cap });
    }
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let colors = refine(g, degrees);
    let mut best: Option<Vec<u8>> = None;
    search(g, colors, &mut best);
    let mut out = (n as u32).to_le_bytes().to_vec();
    out.extend(best.unwrap_or_default());
    Ok(out)
}

/// Iterated color refinement; returned colors are ranks `0..k`.
fn refine<A: Adjacency + ?Sized>(g: &A, mut colors: Vec<usize>) -> Vec<usize> {
    let n = colors.len();
    let mut classes = usize::MAX;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| uniq.binary_search(&s).expect("signature present"))
            .collect();
        let k = uniq.len();
        colors = next;
        if k == classes {
            return colors;
        }
        classes = k;
    }
}

fn search<A: Adjacency + ?Sized>(g: &A, colors: Vec<usize>, best: &mut Option<Vec<u8>>) {
    let n = colors.len();
    let mut counts = vec![0usize; n];
    for &c in &colors {
        counts[c] += 1;
    }
    let Some(target) = (0..n).find(|&c| counts[c] > 1) else {
        let code = encode(g, &colors);
        if best.as_ref().map_or(true, |b| code < *b) {
            *best = Some(code);
        }
        return;
    };
    for v in (0..n).filter(|&v| colors[v] == target) {
        let split: Vec<usize> = colors
            .iter()
            .enumerate()
            .map(|(u, &c)| if c > target || (c == target && u != v) { c + 1 } else { c })
            .collect();
        search(g, refine(g, split), best);
    }
}

/// Upper-triangle adjacency bits under the labeling `v -> pos[v]`, packed
/// most significant bit first.
fn encode<A: Adjacency + ?Sized>(g: &A, pos: &[usize]) -> Vec<u8> {
    let n = pos.len();
    let mut at = vec![0usize; n];
    for (v, &p) in pos.iter().enumerate() {
        at[p] = v;
    }
    let bits = n * n.saturating_sub(1) / 2;
    let mut out = vec![0u8; bits.div_ceil(8)];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(at[i], at[j]) {
                out[k / 8] |= 0x80 >> (k % 8);
            }
            k += 1;
        }
    }
    out
}
