//! Plain hypergraphs: a vertex count and a list of distinct vertex sets.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::model::{DirectedKGraph, Vertex};

use super::LpError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<Vertex>>,
}

impl Hypergraph {
    /// Edges are sorted internally; empty, out-of-range, repeated-vertex and
    /// duplicate edges are rejected.
    pub fn new(n: usize, edges: Vec<Vec<Vertex>>) -> Result<Self, LpError> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            if e.is_empty() {
                return Err(LpError::BadEdge("empty edge".into()));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(LpError::BadEdge(format!("{e:?} repeats a vertex")));
            }
            if e.last().is_some_and(|&v| v as usize >= n) {
                return Err(LpError::BadEdge(format!("{e:?} leaves 0..{n}")));
            }
            if !seen.insert(e.clone()) {
                return Err(LpError::BadEdge(format!("duplicate edge {e:?}")));
            }
            out.push(e);
        }
        Ok(Hypergraph { n, edges: out })
    }

    /// Underlying vertex sets of a k-graph; opposite signs on one set merge.
    pub fn from_graph(g: &DirectedKGraph) -> Self {
        let mut seen = HashSet::new();
        let edges = g
            .edges()
            .filter(|e| seen.insert(e.verts().to_vec()))
            .map(|e| e.verts().to_vec())
            .collect();
        Hypergraph { n: g.n(), edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<Vertex>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Common edge size, if all edges agree (None for no edges).
    pub fn uniformity(&self) -> Option<usize> {
        let k = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == k).then_some(k)
    }

    /// Checks that every edge has `k` vertices.
    pub fn require_uniform(&self, k: usize) -> Result<(), LpError> {
        match self.edges.iter().find(|e| e.len() != k) {
            Some(e) => Err(LpError::NonUniform {
                expected: k,
                found: e.len(),
            }),
            None => Ok(()),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                d[v as usize] += 1;
            }
        }
        d
    }
}

/// Parses `hypergraph n` followed by one edge per line.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, LpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or(LpError::Parse {
        line: 0,
        msg: "empty file".into(),
    })?;
    let n = header
        .strip_prefix("hypergraph")
        .and_then(|r| r.trim().parse::<usize>().ok())
        .ok_or_else(|| LpError::Parse {
            line: hl,
            msg: "header must be `hypergraph n`".into(),
        })?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let e: Result<Vec<Vertex>, _> = l.split_whitespace().map(str::parse).collect();
        edges.push(e.map_err(|_| LpError::Parse {
            line,
            msg: format!("bad edge '{l}'"),
        })?);
    }
    Hypergraph::new(n, edges)
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("hypergraph {}\n", h.n());
    for e in h.edges() {
        let parts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", parts.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Hypergraph::new(3, vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 3]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![]]).is_err());
        let h = Hypergraph::new(3, vec![vec![2, 0], vec![1, 2]]).unwrap();
        assert_eq!(h.edges()[0], vec![0, 2]);
        assert_eq!(h.uniformity(), Some(2));
        assert_eq!(h.degrees(), vec![1, 1, 2]);
    }

    #[test]
    fn file_round_trip() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(parse_hypergraph(&write_hypergraph(&h)).unwrap(), h);
        assert!(parse_hypergraph("graph 3\n").is_err());
    }
}
