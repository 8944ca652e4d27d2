//! Graph file formats.
//!
//! JSON: `{"n": 8, "d": 3, "edges": [[0, 1], ...]}` with `u < v` and edges
//! sorted lexicographically. Text: a `# n d` header, then one `u v` per line.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Adjacency, RegularGraph};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn from_graph(g: &RegularGraph) -> Self {
        GraphFile {
            n: g.n(),
            d: g.d(),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn into_graph(self) -> Result<RegularGraph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        RegularGraph::from_edges(self.n, self.d, &edges)
    }
}

pub fn to_json(g: &RegularGraph) -> String {
    serde_json::to_string(&GraphFile::from_graph(g)).expect("graph serializes")
}

pub fn from_json(s: &str) -> Result<RegularGraph> {
    serde_json::from_str::<GraphFile>(s)?.into_graph()
}

pub fn to_edge_list(g: &RegularGraph) -> String {
    let mut out = format!("# {} {}\n", g.n(), g.d());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn from_edge_list(s: &str) -> Result<RegularGraph> {
    let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| Error::Parse("edge list must start with a '# n d' header".into()))?;
    let nums = parse_pair(header)?;
    let (n, d) = (nums.0, nums.1);
    let edges = lines.map(parse_pair).collect::<Result<Vec<_>>>()?;
    RegularGraph::from_edges(n, d, &edges)
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("expected two integers, got {line:?}"));
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(bad()),
    }
}

/// Parse either format, chosen by the first non-blank character.
pub fn parse_graph(s: &str) -> Result<RegularGraph> {
    if s.trim_start().starts_with('{') {
        from_json(s)
    } else {
        from_edge_list(s)
    }
}

pub fn read_graph(path: &Path) -> Result<RegularGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}
