//! Finite truncations of the infinite `d`-regular tree and of the rooted
//! `(d-1)`-ary tree, in BFS order with the root at vertex 0.

use serde::{Deserialize, Serialize};

use super::{DeficitGraph, Graph};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeKind {
    /// Every vertex has `d` neighbors in the infinite tree; deficit `g ≡ 0`.
    Regular,
    /// The root has `d - 1` children and deficit 1; all others as above.
    Ary,
}

#[derive(Clone, Debug)]
pub struct TruncatedTree {
    kind: TreeKind,
    d: usize,
    depth: usize,
    parent: Vec<Option<usize>>,
    level: Vec<usize>,
    graph: DeficitGraph,
}

impl TruncatedTree {
    /// Ball of radius `depth` around the root.
    pub fn new(kind: TreeKind, d: usize, depth: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameters(format!("tree degree d = {d} must be at least 3")));
        }
        let root_children = match kind {
            TreeKind::Regular => d,
            TreeKind::Ary => d - 1,
        };
        let mut parent = vec![None];
        let mut level = vec![0];
        let mut edges = Vec::new();
        let mut layer = vec![0usize];
        for k in 1..=depth {
            let mut next = Vec::new();
            for &u in &layer {
                let children = if u == 0 { root_children } else { d - 1 };
                for _ in 0..children {
                    let v = parent.len();
                    parent.push(Some(u));
                    level.push(k);
                    edges.push((u, v));
                    next.push(v);
                }
            }
            layer = next;
        }
        let n = parent.len();
        let mut deficit = vec![0; n];
        if kind == TreeKind::Ary {
            deficit[0] = 1;
        }
        let graph = DeficitGraph::new(Graph::from_edges(n, &edges)?, d, deficit, (0..n).collect())?;
        Ok(TruncatedTree {
            kind,
            d,
            depth,
            parent,
            level,
            graph,
        })
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Distance from the root.
    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn graph(&self) -> &DeficitGraph {
        &self.graph
    }

    fn lca(&self, mut i: usize, mut j: usize) -> usize {
        while self.level[i] > self.level[j] {
            i = self.parent[i].unwrap();
        }
        while self.level[j] > self.level[i] {
            j = self.parent[j].unwrap();
        }
        while i != j {
            i = self.parent[i].unwrap();
            j = self.parent[j].unwrap();
        }
        i
    }

    pub fn dist(&self, i: usize, j: usize) -> usize {
        let a = self.lca(i, j);
        self.level[i] + self.level[j] - 2 * self.level[a]
    }

    /// Distance from the root to the common ancestor of `i` and `j`.
    pub fn anc(&self, i: usize, j: usize) -> usize {
        self.level[self.lca(i, j)]
    }
}
