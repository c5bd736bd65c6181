//! The (f,b)-graph of a system: colors on one side, host vertices on the
//! other. Colors are cut into consecutive blocks `I_i` of size `f`, and
//! `I_i ∪ e` is an edge when the b-set `e` hosts a rainbow copy with colors
//! exactly `I_i`. Perfect matchings are then rainbow factors.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use crate::lp::Hypergraph;
use crate::model::rainbow::{check_compatible, first_copy_on_set, hosting_sets};
use crate::model::{GraphSystem, ModelError, PatternF, RainbowPacking, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FbError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("strict mode needs m = n f / b = {expected}, got m = {m}")]
    StrictMismatch { m: usize, expected: usize },
    #[error("b = {b} does not divide n = {n}")]
    Divisibility { n: usize, b: usize },
    #[error("not a matching: {0}")]
    NotMatching(String),
    #[error("edge {0} is not realizable as a rainbow copy")]
    Unrealizable(String),
    #[error("color set {0:?} is not a block")]
    NotBlock(Vec<usize>),
    #[error("edge {0} is not in the (f,b)-graph")]
    MissingEdge(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FbMode {
    /// `b | n` and `m = n f / b`.
    Strict,
    /// Any `m`; trailing colors beyond the last full block are dropped.
    Relaxed,
}

/// An edge: color block index plus sorted host b-set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FbEdge {
    pub block: usize,
    pub verts: Vec<Vertex>,
}

impl FbEdge {
    pub fn new(block: usize, mut verts: Vec<Vertex>) -> Self {
        verts.sort_unstable();
        FbEdge { block, verts }
    }
}

/// A vertex of the (f,b)-graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FbVertex {
    Color(usize),
    Host(Vertex),
}

#[derive(Clone, Debug)]
pub struct FbGraph {
    num_a: usize,
    num_b: usize,
    f: usize,
    b: usize,
    edges: Vec<FbEdge>,
    index: HashMap<FbEdge, usize>,
    by_block: Vec<Vec<usize>>,
}

impl PartialEq for FbGraph {
    fn eq(&self, other: &Self) -> bool {
        (self.num_a, self.num_b, self.f, self.b) == (other.num_a, other.num_b, other.f, other.b)
            && self.edges == other.edges
    }
}

impl FbGraph {
    /// An edgeless graph with `blocks` color blocks and `num_b` host vertices.
    pub fn empty(blocks: usize, num_b: usize, f: usize, b: usize) -> Self {
        FbGraph {
            num_a: blocks * f,
            num_b,
            f,
            b,
            edges: Vec::new(),
            index: HashMap::new(),
            by_block: vec![Vec::new(); blocks],
        }
    }

    /// Adds `I_block ∪ verts`; returns false if it was present.
    pub fn add_edge(&mut self, block: usize, verts: Vec<Vertex>) -> Result<bool, FbError> {
        let e = FbEdge::new(block, verts);
        if block >= self.num_blocks() {
            return Err(FbError::NotBlock(self.block_colors(block).collect()));
        }
        if e.verts.len() != self.b
            || e.verts.windows(2).any(|w| w[0] == w[1])
            || e.verts.iter().any(|&v| v as usize >= self.num_b)
        {
            return Err(FbError::Model(ModelError::BadEdge(format!(
                "host part {:?} is not a b-set of 0..{}",
                e.verts, self.num_b
            ))));
        }
        if self.index.contains_key(&e) {
            return Ok(false);
        }
        self.index.insert(e.clone(), self.edges.len());
        self.by_block[block].push(self.edges.len());
        self.edges.push(e);
        Ok(true)
    }

    pub fn num_a(&self) -> usize {
        self.num_a
    }

    pub fn num_b(&self) -> usize {
        self.num_b
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn num_blocks(&self) -> usize {
        self.by_block.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[FbEdge] {
        &self.edges
    }

    /// The colors of block `i`.
    pub fn block_colors(&self, i: usize) -> Range<usize> {
        i * self.f..(i + 1) * self.f
    }

    /// Indices (into `edges()`) of the edges of block `i`, in insertion order.
    pub fn block_edge_indices(&self, i: usize) -> &[usize] {
        &self.by_block[i]
    }

    pub fn edge_index(&self, e: &FbEdge) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &FbEdge) -> bool {
        self.index.contains_key(e)
    }

    /// The whole vertex set is balanced: `b |A| = f |B|`.
    pub fn is_strict(&self) -> bool {
        self.b * self.num_a == self.f * self.num_b
    }

    /// The graph as a plain hypergraph on `|A| + |B|` vertices: color `c` is
    /// vertex `c`, host vertex `v` is `|A| + v`. Edge order follows `edges()`.
    pub fn to_hypergraph(&self) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut v: Vec<Vertex> = self.block_colors(e.block).map(|c| c as Vertex).collect();
                v.extend(e.verts.iter().map(|&x| x + self.num_a as Vertex));
                v
            })
            .collect();
        Hypergraph::new(self.num_a + self.num_b, edges).expect("edges are distinct")
    }

    /// The b-graph of host parts of block `i`, edges in `block_edge_indices` order.
    pub fn block_hypergraph(&self, i: usize) -> Hypergraph {
        let edges = self.by_block[i].iter().map(|&j| self.edges[j].verts.clone()).collect();
        Hypergraph::new(self.num_b, edges).expect("edges are distinct")
    }
}

/// Builds the (f,b)-graph of `sys` for `pattern`.
pub fn build_fb_graph(sys: &GraphSystem, pattern: &PatternF, mode: FbMode) -> Result<FbGraph, FbError> {
    let (n, m, f, b) = (sys.n(), sys.m(), pattern.f(), pattern.b());
    if mode == FbMode::Strict {
        if n % b != 0 {
            return Err(FbError::Divisibility { n, b });
        }
        if m != n / b * f {
            return Err(FbError::StrictMismatch { m, expected: n / b * f });
        }
    }
    check_compatible(sys, pattern)?;
    let mut g = FbGraph::empty(m / f, n, f, b);
    for i in 0..g.num_blocks() {
        let palette: Vec<usize> = g.block_colors(i).collect();
        for s in hosting_sets(sys, pattern, &palette) {
            g.add_edge(i, s)?;
        }
    }
    Ok(g)
}

/// Whether `s` satisfies `b |S ∩ A| = f |S ∩ B|` (repeats counted once).
pub fn is_balanced(s: &[FbVertex], g: &FbGraph) -> bool {
    let distinct: HashSet<&FbVertex> = s.iter().collect();
    let a = distinct.iter().filter(|v| matches!(v, FbVertex::Color(_))).count();
    let bside = distinct.len() - a;
    g.b() * a == g.f() * bside
}

/// Checks that `m` is a set of pairwise disjoint edges of `g`.
pub fn check_matching(g: &FbGraph, m: &[FbEdge]) -> Result<(), FbError> {
    let mut blocks = HashSet::new();
    let mut verts = HashSet::new();
    for e in m {
        if !g.contains(e) {
            return Err(FbError::MissingEdge(format!("{e:?}")));
        }
        if !blocks.insert(e.block) {
            return Err(FbError::NotMatching(format!("block {} used twice", e.block)));
        }
        for &v in &e.verts {
            if !verts.insert(v) {
                return Err(FbError::NotMatching(format!("vertex {v} used twice")));
            }
        }
    }
    Ok(())
}

/// Turns a matching into a rainbow packing: the i-th edge becomes a copy on
/// its host part using exactly the colors of its block.
pub fn matching_to_packing(
    g: &FbGraph,
    m: &[FbEdge],
    sys: &GraphSystem,
    pattern: &PatternF,
) -> Result<RainbowPacking, FbError> {
    check_matching(g, m)?;
    let mut copies = Vec::with_capacity(m.len());
    for e in m {
        let palette: Vec<usize> = g.block_colors(e.block).collect();
        let copy = first_copy_on_set(sys, pattern, &e.verts, &palette)
            .ok_or_else(|| FbError::Unrealizable(format!("{e:?}")))?;
        copies.push(copy);
    }
    Ok(RainbowPacking::new(copies))
}

/// Inverse of [`matching_to_packing`]: each copy must use exactly one block.
pub fn packing_to_matching(g: &FbGraph, packing: &RainbowPacking) -> Result<Vec<FbEdge>, FbError> {
    let mut out = Vec::with_capacity(packing.len());
    for c in &packing.copies {
        let colors = c.color_set();
        let block = colors.first().map_or(0, |&c0| c0 / g.f().max(1));
        if block >= g.num_blocks() || !colors.iter().copied().eq(g.block_colors(block)) {
            return Err(FbError::NotBlock(colors));
        }
        let e = FbEdge::new(block, c.vertex_set());
        if !g.contains(&e) {
            return Err(FbError::MissingEdge(format!("{e:?}")));
        }
        out.push(e);
    }
    check_matching(g, &out)?;
    Ok(out)
}

/// Text form: `fb |A| |B| f b`, then `a1 … af | v1 … vb` per edge.
pub fn write_fb(g: &FbGraph) -> String {
    let mut out = format!("fb {} {} {} {}\n", g.num_a(), g.num_b(), g.f(), g.b());
    for e in g.edges() {
        let a: Vec<String> = g.block_colors(e.block).map(|c| c.to_string()).collect();
        let v: Vec<String> = e.verts.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{} | {}", a.join(" "), v.join(" "));
    }
    out
}

pub fn parse_fb(text: &str) -> Result<FbGraph, FbError> {
    let perr = |line: usize, msg: &str| FbError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(0, "empty file"))?;
    let nums: Vec<usize> = header
        .strip_prefix("fb")
        .ok_or_else(|| perr(hl, "header must start with `fb`"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(hl, "bad header number")))
        .collect::<Result<_, _>>()?;
    let [num_a, num_b, f, b] = nums[..] else {
        return Err(perr(hl, "header must be `fb |A| |B| f b`"));
    };
    if f == 0 || b == 0 || num_a % f != 0 {
        return Err(perr(hl, "|A| must be a positive multiple of f"));
    }
    let mut g = FbGraph::empty(num_a / f, num_b, f, b);
    for (line, l) in lines {
        let (a, v) = l.split_once('|').ok_or_else(|| perr(line, "missing `|`"))?;
        let mut colors: Vec<usize> = a
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(line, "bad color")))
            .collect::<Result<_, _>>()?;
        let verts: Vec<Vertex> = v
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(line, "bad vertex")))
            .collect::<Result<_, _>>()?;
        colors.sort_unstable();
        let block = colors.first().copied().unwrap_or(usize::MAX) / f;
        if block >= g.num_blocks() || !colors.iter().copied().eq(g.block_colors(block)) {
            return Err(perr(line, "color part is not a block"));
        }
        if !g.add_edge(block, verts)? {
            return Err(perr(line, "duplicate edge"));
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DirectedKGraph, RainbowCopy};

    fn triangles() -> GraphSystem {
        let t = DirectedKGraph::from_edges(3, 2, [vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        GraphSystem::replicate(&t, 3).unwrap()
    }

    #[test]
    fn triangle_fb_graph() {
        let k3 = PatternF::clique(3).unwrap();
        let g = build_fb_graph(&triangles(), &k3, FbMode::Strict).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(g.is_strict());
        let m = vec![FbEdge::new(0, vec![0, 1, 2])];
        let p = matching_to_packing(&g, &m, &triangles(), &k3).unwrap();
        assert_eq!(p.copies, vec![RainbowCopy::new(vec![0, 1, 2], vec![0, 1, 2])]);
        assert!(p.is_factor(&triangles(), &k3));
        assert_eq!(packing_to_matching(&g, &p).unwrap(), m);
        assert!(matching_to_packing(&g, &[], &triangles(), &k3).unwrap().is_empty());
    }

    #[test]
    fn matching_pairs() {
        let pm = DirectedKGraph::from_edges(4, 2, [vec![0, 1], vec![2, 3]]).unwrap();
        let sys = GraphSystem::replicate(&pm, 2).unwrap();
        let e = PatternF::single_edge(2).unwrap();
        let g = build_fb_graph(&sys, &e, FbMode::Strict).unwrap();
        assert_eq!(g.num_edges(), 4);
        let bad = vec![FbEdge::new(0, vec![0, 1]), FbEdge::new(0, vec![2, 3])];
        assert!(matches!(check_matching(&g, &bad), Err(FbError::NotMatching(_))));
    }

    #[test]
    fn strict_mode_errors() {
        let k3 = PatternF::clique(3).unwrap();
        let t = DirectedKGraph::complete(3, 2).unwrap();
        let sys = GraphSystem::replicate(&t, 4).unwrap();
        assert!(matches!(
            build_fb_graph(&sys, &k3, FbMode::Strict),
            Err(FbError::StrictMismatch { .. })
        ));
        let g = build_fb_graph(&sys, &k3, FbMode::Relaxed).unwrap();
        assert_eq!(g.num_blocks(), 1);
    }

    #[test]
    fn balanced_sets() {
        let k3 = PatternF::clique(3).unwrap();
        let g = build_fb_graph(&triangles(), &k3, FbMode::Strict).unwrap();
        let s: Vec<FbVertex> = (0..3).map(FbVertex::Color).chain((0..3).map(FbVertex::Host)).collect();
        assert!(is_balanced(&s, &g));
        assert!(is_balanced(&[], &g));
        let e = FbGraph::empty(2, 4, 1, 2);
        assert!(!is_balanced(&[FbVertex::Color(0)], &e));
    }

    #[test]
    fn text_round_trip() {
        let e = PatternF::single_edge(2).unwrap();
        let pm = DirectedKGraph::from_edges(4, 2, [vec![0, 1], vec![2, 3]]).unwrap();
        let g = build_fb_graph(&GraphSystem::replicate(&pm, 2).unwrap(), &e, FbMode::Strict).unwrap();
        let text = write_fb(&g);
        assert!(text.starts_with("fb 2 4 1 2\n0 | 0 1\n"));
        assert_eq!(parse_fb(&text).unwrap(), g);
        assert!(parse_fb("fb 2 4 1 2\n0 1 | 0 1\n").is_err());
    }
}
