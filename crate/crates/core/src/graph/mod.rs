//! Simple undirected graphs, `d`-regular graphs, graphs carrying a deficit
//! function, and the neighborhood / excess bookkeeping built on top of them.
//!
//! Vertices are dense `usize` ids. Adjacency lists are kept sorted so that
//! edge queries are a binary search and iteration order is deterministic.

mod canon;
mod enumerate;
mod generate;
pub mod io;
mod tree_like;
mod trees;

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use canon::{canonical_form, canonical_form_with_cap, DEFAULT_CANON_CAP};
pub use enumerate::{class_distribution, for_each_labeled_regular, ClassDistribution};
pub use generate::{generate_regular, generate_regular_with, DEFAULT_MAX_ATTEMPTS};
pub use tree_like::{classify_tree_like, TreeLikeReport};
pub use trees::{TreeKind, TruncatedTree};

/// Read access to an undirected graph on vertices `0..vertex_count()`.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;

    /// Sorted neighbor list of `v`.
    fn neighbors(&self, v: usize) -> &[usize];

    fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.vertex_count() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// A simple undirected graph: no loops, no repeated edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.adj.len() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.adj.len(),
            });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at {u}")));
        }
        let pos = match self.adj[u].binary_search(&v) {
            Ok(_) => return Err(Error::InvalidGraph(format!("repeated edge {{{u}, {v}}}"))),
            Err(p) => p,
        };
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        match (self.adj[u].binary_search(&v), self.adj[v].binary_search(&u)) {
            (Ok(i), Ok(j)) => {
                self.adj[u].remove(i);
                self.adj[v].remove(j);
                Ok(())
            }
            _ => Err(Error::InvalidGraph(format!("no edge {{{u}, {v}}}"))),
        }
    }

    /// Subgraph induced on `vertices`; local vertex `k` is `vertices[k]`.
    pub fn induced<A: Adjacency + ?Sized>(g: &A, vertices: &[usize]) -> Graph {
        let n = g.vertex_count();
        let mut local = vec![usize::MAX; n];
        for (k, &v) in vertices.iter().enumerate() {
            local[v] = k;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut row: Vec<usize> = g
                    .neighbors(v)
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect();
                row.sort_unstable();
                row
            })
            .collect();
        Graph { adj }
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameters("relabeling is not a permutation".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for (v, row) in self.adj.iter().enumerate() {
            let mut new_row: Vec<usize> = row.iter().map(|&w| perm[w]).collect();
            new_row.sort_unstable();
            adj[perm[v]] = new_row;
        }
        Ok(Graph { adj })
    }
}

impl Adjacency for Graph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }
}

/// A simple graph in which every vertex has degree exactly `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegularGraph {
    graph: Graph,
    d: usize,
}

impl RegularGraph {
    pub fn new(graph: Graph, d: usize) -> Result<Self> {
        if let Some(v) = (0..graph.vertex_count()).find(|&v| graph.degree(v) != d) {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} has degree {}, expected {d}",
                graph.degree(v)
            )));
        }
        Ok(RegularGraph { graph, d })
    }

    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        RegularGraph::new(Graph::from_edges(n, edges)?, d)
    }

    pub fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn relabel(&self, perm: &[usize]) -> Result<RegularGraph> {
        Ok(RegularGraph {
            graph: self.graph.relabel(perm)?,
            d: self.d,
        })
    }

    /// Replace edges `{v1,v2}, {v3,v4}` by `{v1,v4}, {v2,v3}`.
    pub fn simple_switch(&self, v1: usize, v2: usize, v3: usize, v4: usize) -> Result<RegularGraph> {
        let vs = [v1, v2, v3, v4];
        for &v in &vs {
            self.graph.check_vertex(v)?;
        }
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| vs[i] != vs[j]));
        if !distinct {
            return Err(Error::SwitchPrecondition(format!("vertices {vs:?} are not distinct")));
        }
        if !self.has_edge(v1, v2) || !self.has_edge(v3, v4) {
            return Err(Error::SwitchPrecondition(format!(
                "{{{v1},{v2}}} and {{{v3},{v4}}} must both be edges"
            )));
        }
        if self.has_edge(v1, v4) || self.has_edge(v2, v3) {
            return Err(Error::SwitchPrecondition(format!(
                "{{{v1},{v4}}} or {{{v2},{v3}}} is already an edge"
            )));
        }
        let mut graph = self.graph.clone();
        graph.remove_edge(v1, v2)?;
        graph.remove_edge(v3, v4)?;
        graph.add_edge(v1, v4)?;
        graph.add_edge(v2, v3)?;
        Ok(RegularGraph { graph, d: self.d })
    }
}

impl Adjacency for RegularGraph {
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        self.graph.neighbors(v)
    }
}

/// A graph with degrees bounded by `d` together with a deficit function
/// `g` satisfying `deg(v) <= d - g(v)`.
///
/// `ids[v]` is the id of local vertex `v` in whatever graph this one was cut
/// out of, so that vertex removal never silently re-indexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeficitGraph {
    graph: Graph,
    d: usize,
    deficit: Vec<usize>,
    ids: Vec<usize>,
}

impl DeficitGraph {
    pub fn new(graph: Graph, d: usize, deficit: Vec<usize>, ids: Vec<usize>) -> Result<Self> {
        let n = graph.vertex_count();
        if deficit.len() != n || ids.len() != n {
            return Err(Error::InvalidParameters(
                "deficit and id vectors must have one entry per vertex".into(),
            ));
        }
        for v in 0..n {
            if deficit[v] > d || graph.degree(v) + deficit[v] > d {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v}: degree {} with deficit {} exceeds d = {d}",
                    graph.degree(v),
                    deficit[v]
                )));
            }
        }
        Ok(DeficitGraph {
            graph,
            d,
            deficit,
            ids,
        })
    }

    /// `g ≡ 0`, identity ids.
    pub fn from_regular(g: &RegularGraph) -> Self {
        let n = g.n();
        DeficitGraph {
            graph: g.graph.clone(),
            d: g.d,
            deficit: vec![0; n],
            ids: (0..n).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn deficit(&self, v: usize) -> usize {
        self.deficit[v]
    }

    pub fn deficits(&self) -> &[usize] {
        &self.deficit
    }

    /// Id of local vertex `v` in the parent graph.
    pub fn id(&self, v: usize) -> usize {
        self.ids[v]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Number of missing edges at `v`: `d - g(v) - deg(v)`.
    pub fn missing(&self, v: usize) -> usize {
        self.d - self.deficit[v] - self.graph.degree(v)
    }

    pub fn is_extensible(&self, v: usize) -> bool {
        self.missing(v) > 0
    }

    /// Local index of the vertex with parent id `id`.
    pub fn local_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Remove the (local) vertices `removed`; each surviving vertex's deficit
    /// grows by the number of neighbors it lost.
    pub fn remove_vertices(&self, removed: &[usize]) -> Result<DeficitGraph> {
        let n = self.graph.vertex_count();
        let mut gone = vec![false; n];
        for &t in removed {
            self.graph.check_vertex(t)?;
            gone[t] = true;
        }
        let keep: Vec<usize> = (0..n).filter(|&v| !gone[v]).collect();
        let graph = Graph::induced(&self.graph, &keep);
        let deficit = keep
            .iter()
            .enumerate()
            .map(|(k, &v)| self.deficit[v] + self.graph.degree(v) - graph.degree(k))
            .collect();
        let ids = keep.iter().map(|&v| self.ids[v]).collect();
        Ok(DeficitGraph {
            graph,
            d: self.d,
            deficit,
            ids,
        })
    }

    /// The induced subgraph on `nb`, with the deficit restricted from `self`
    /// (the convention for subgraphs not produced by vertex removal). Ids
    /// refer to the parent of `self`.
    pub fn restrict(&self, nb: &Neighborhood) -> DeficitGraph {
        DeficitGraph {
            graph: nb.graph.clone(),
            d: self.d,
            deficit: nb.ids.iter().map(|&v| self.deficit[v]).collect(),
            ids: nb.ids.iter().map(|&v| self.ids[v]).collect(),
        }
    }
}

impl Adjacency for DeficitGraph {
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        self.graph.neighbors(v)
    }
}

/// The subgraph induced on all vertices within distance `radius` of a
/// center set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    pub centers: Vec<usize>,
    pub radius: usize,
    /// Induced subgraph in local ids.
    pub graph: Graph,
    /// Local id -> id in the parent graph. Ordered by (distance, id).
    pub ids: Vec<usize>,
    /// Distance of each local vertex from the center set.
    pub dist: Vec<usize>,
}

impl Neighborhood {
    pub fn local_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Radius-`r` neighborhood of `centers`.
pub fn ball<A: Adjacency + ?Sized>(g: &A, centers: &[usize], r: usize) -> Result<Neighborhood> {
    let n = g.vertex_count();
    if centers.is_empty() {
        return Err(Error::InvalidParameters("ball needs at least one center".into()));
    }
    if let Some(&v) = centers.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let mut dist = vec![usize::MAX; n];
    let mut layer: Vec<usize> = centers.to_vec();
    layer.sort_unstable();
    layer.dedup();
    for &c in &layer {
        dist[c] = 0;
    }
    let mut ids = Vec::new();
    let mut dists = Vec::new();
    for depth in 0..=r {
        ids.extend_from_slice(&layer);
        dists.extend(std::iter::repeat(depth).take(layer.len()));
        if depth == r {
            break;
        }
        let mut next = Vec::new();
        for &u in &layer {
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = depth + 1;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        layer = next;
    }
    let graph = Graph::induced(g, &ids);
    Ok(Neighborhood {
        centers: centers.to_vec(),
        radius: r,
        graph,
        ids,
        dist: dists,
    })
}

/// Number of connected components.
pub fn components<A: Adjacency + ?Sized>(g: &A) -> usize {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// `#edges - #vertices + #components`: the number of edges whose removal
/// leaves a forest.
pub fn excess<A: Adjacency + ?Sized>(g: &A) -> usize {
    g.edge_count() + components(g) - g.vertex_count()
}

/// BFS distances from a vertex set; `usize::MAX` marks unreachable vertices.
pub fn distances_from<A: Adjacency + ?Sized>(g: &A, sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Distance between two vertex sets; `None` when they lie in different
/// components.
pub fn graph_distance<A: Adjacency + ?Sized>(g: &A, a: &[usize], b: &[usize]) -> Result<Option<usize>> {
    let n = g.vertex_count();
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameters("distance needs nonempty vertex sets".into()));
    }
    if let Some(&v) = a.iter().chain(b).find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let mut target = vec![false; n];
    for &v in b {
        target[v] = true;
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &s in a {
        if target[s] {
            return Ok(Some(0));
        }
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                if target[w] {
                    return Ok(Some(dist[w]));
                }
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}
