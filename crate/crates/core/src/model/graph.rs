//! Directed k-graphs and graph systems.
//!
//! A directed k-graph stores each edge as a sorted k-set of vertices plus a
//! sign. Signs are read against the global integer order of the vertices: for
//! `k = 2`, `+` on `{u, v}` with `u < v` is the arc `u -> v` and `-` is the arc
//! `v -> u`. For larger `k` the sign behaves like the orientation of a simplex,
//! so relabelling vertices flips it by the parity of the sorting permutation.
//!
//! Undirected graphs only ever store `+`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use smallvec::SmallVec;

use super::ModelError;

pub type Vertex = u32;
pub type VertexList = SmallVec<[Vertex; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An edge: sorted distinct vertices and a sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    verts: VertexList,
    sign: Sign,
}

impl Edge {
    /// Builds an edge from vertices in any order. The sign is given relative to
    /// the order in which `verts` is listed and is re-expressed against the
    /// sorted order.
    pub fn oriented(verts: &[Vertex], sign: Sign) -> Edge {
        let mut v: VertexList = verts.iter().copied().collect();
        let parity = sort_parity(&mut v);
        Edge {
            verts: v,
            sign: if parity { sign.flip() } else { sign },
        }
    }

    /// Builds an edge whose vertices are already sorted (they are sorted here
    /// anyway, without touching the sign).
    pub fn sorted(verts: &[Vertex], sign: Sign) -> Edge {
        let mut v: VertexList = verts.iter().copied().collect();
        v.sort_unstable();
        Edge { verts: v, sign }
    }

    pub fn undirected(verts: &[Vertex]) -> Edge {
        Edge::sorted(verts, Sign::Plus)
    }

    /// Arc `from -> to` of a digraph.
    pub fn arc(from: Vertex, to: Vertex) -> Edge {
        Edge::oriented(&[from, to], Sign::Plus)
    }

    pub fn verts(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.verts.binary_search(&v).is_ok()
    }

    /// For a 2-edge read as an arc, the tail.
    pub fn tail(&self) -> Vertex {
        debug_assert_eq!(self.verts.len(), 2);
        match self.sign {
            Sign::Plus => self.verts[0],
            Sign::Minus => self.verts[1],
        }
    }

    /// For a 2-edge read as an arc, the head.
    pub fn head(&self) -> Vertex {
        debug_assert_eq!(self.verts.len(), 2);
        match self.sign {
            Sign::Plus => self.verts[1],
            Sign::Minus => self.verts[0],
        }
    }

    /// Image of this edge under a vertex map, with the sign translated through
    /// the global order.
    pub fn map(&self, phi: impl Fn(Vertex) -> Vertex) -> Edge {
        let image: VertexList = self.verts.iter().map(|&v| phi(v)).collect();
        Edge::oriented(&image, self.sign)
    }

    pub fn with_sign(&self, sign: Sign) -> Edge {
        Edge {
            verts: self.verts.clone(),
            sign,
        }
    }
}

/// Sorts in place and returns whether the sorting permutation is odd.
fn sort_parity(v: &mut [Vertex]) -> bool {
    let mut odd = false;
    // insertion sort, k is tiny
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    odd
}

/// Vertex classes for k-partite mode. Classes are indexed `0..classes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: usize,
}

impl Partition {
    pub fn new(class_of: Vec<usize>) -> Partition {
        let classes = class_of.iter().map(|c| c + 1).max().unwrap_or(0);
        Partition { class_of, classes }
    }

    /// `classes` contiguous classes of equal size.
    pub fn contiguous(n: usize, classes: usize) -> Result<Partition, ModelError> {
        if classes == 0 || !n.is_multiple_of(classes) {
            return Err(ModelError::BadPartition(format!(
                "{n} vertices cannot be split into {classes} equal classes"
            )));
        }
        let size = n / classes;
        Ok(Partition {
            class_of: (0..n).map(|v| v / size).collect(),
            classes,
        })
    }

    pub fn class_of(&self, v: Vertex) -> usize {
        self.class_of[v as usize]
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn members(&self, class: usize) -> Vec<Vertex> {
        (0..self.class_of.len() as Vertex)
            .filter(|&v| self.class_of[v as usize] == class)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct DirectedKGraph {
    n: usize,
    k: usize,
    directed: bool,
    partition: Option<Partition>,
    edges: BTreeSet<Edge>,
    lookup: HashSet<Edge>,
}

impl PartialEq for DirectedKGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.directed == other.directed
            && self.partition == other.partition
            && self.edges == other.edges
    }
}

impl DirectedKGraph {
    pub fn new(n: usize, k: usize, directed: bool) -> Result<Self, ModelError> {
        if k < 2 {
            return Err(ModelError::BadUniformity(k));
        }
        Ok(DirectedKGraph {
            n,
            k,
            directed,
            partition: None,
            edges: BTreeSet::new(),
            lookup: HashSet::new(),
        })
    }

    pub fn with_partition(mut self, partition: Partition) -> Result<Self, ModelError> {
        if partition.len() != self.n {
            return Err(ModelError::BadPartition(format!(
                "partition covers {} vertices, graph has {}",
                partition.len(),
                self.n
            )));
        }
        for e in &self.edges {
            check_partite(&partition, e)?;
        }
        self.partition = Some(partition);
        Ok(self)
    }

    pub fn undirected(n: usize, k: usize) -> Result<Self, ModelError> {
        Self::new(n, k, false)
    }

    pub fn from_edges(n: usize, k: usize, edges: impl IntoIterator<Item = Vec<Vertex>>) -> Result<Self, ModelError> {
        let mut g = Self::undirected(n, k)?;
        for e in edges {
            g.insert(Edge::undirected(&e))?;
        }
        Ok(g)
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, ModelError> {
        let mut g = Self::new(n, 2, true)?;
        for (a, b) in arcs {
            g.insert(Edge::arc(a, b))?;
        }
        Ok(g)
    }

    pub fn complete(n: usize, k: usize) -> Result<Self, ModelError> {
        let mut g = Self::undirected(n, k)?;
        for s in k_subsets(n, k) {
            g.insert(Edge::undirected(&s))?;
        }
        Ok(g)
    }

    /// Complete digraph: both arcs on every pair.
    pub fn complete_digraph(n: usize) -> Result<Self, ModelError> {
        let mut g = Self::new(n, 2, true)?;
        for s in k_subsets(n, 2) {
            g.insert(Edge::sorted(&s, Sign::Plus))?;
            g.insert(Edge::sorted(&s, Sign::Minus))?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.lookup.contains(e)
    }

    /// Membership ignoring the sign.
    pub fn contains_any_sign(&self, e: &Edge) -> bool {
        self.lookup.contains(&e.with_sign(Sign::Plus))
            || (self.directed && self.lookup.contains(&e.with_sign(Sign::Minus)))
    }

    pub fn validate_edge(&self, e: &Edge) -> Result<(), ModelError> {
        if e.len() != self.k {
            return Err(ModelError::BadEdge(format!(
                "edge {:?} has {} vertices, expected {}",
                e.verts(),
                e.len(),
                self.k
            )));
        }
        if e.verts().windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::BadEdge(format!("edge {:?} repeats a vertex", e.verts())));
        }
        if let Some(&v) = e.verts().iter().find(|&&v| v as usize >= self.n) {
            return Err(ModelError::BadEdge(format!("vertex {v} out of range 0..{}", self.n)));
        }
        if !self.directed && e.sign() == Sign::Minus {
            return Err(ModelError::BadEdge("undirected graphs store only '+' edges".into()));
        }
        if let Some(p) = &self.partition {
            check_partite(p, e)?;
        }
        Ok(())
    }

    /// Inserts an edge; returns an error on malformed or duplicate edges.
    pub fn insert(&mut self, e: Edge) -> Result<(), ModelError> {
        self.validate_edge(&e)?;
        if !self.lookup.insert(e.clone()) {
            return Err(ModelError::DuplicateEdge(format!("{:?}{}", e.verts(), e.sign())));
        }
        self.edges.insert(e);
        Ok(())
    }

    /// Inserts unless already present. Returns whether it was new.
    pub fn add(&mut self, e: Edge) -> Result<bool, ModelError> {
        self.validate_edge(&e)?;
        if self.lookup.contains(&e) {
            return Ok(false);
        }
        self.lookup.insert(e.clone());
        self.edges.insert(e);
        Ok(true)
    }

    pub fn remove(&mut self, e: &Edge) -> bool {
        self.lookup.remove(e) && self.edges.remove(e)
    }

    /// Induced subgraph on `keep`, relabelled to `0..keep.len()` in the given order.
    /// The order of `keep` must be increasing so signs are preserved.
    pub fn induced(&self, keep: &[Vertex]) -> DirectedKGraph {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let mut index = vec![u32::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v as usize] = i as Vertex;
        }
        let mut g = DirectedKGraph {
            n: keep.len(),
            k: self.k,
            directed: self.directed,
            partition: self
                .partition
                .as_ref()
                .map(|p| Partition::new(keep.iter().map(|&v| p.class_of(v)).collect())),
            edges: BTreeSet::new(),
            lookup: HashSet::new(),
        };
        for e in &self.edges {
            if e.verts().iter().all(|&v| index[v as usize] != u32::MAX) {
                let mapped = e.map(|v| index[v as usize]);
                g.lookup.insert(mapped.clone());
                g.edges.insert(mapped);
            }
        }
        g
    }
}

fn check_partite(p: &Partition, e: &Edge) -> Result<(), ModelError> {
    let mut seen = SmallVec::<[usize; 4]>::new();
    for &v in e.verts() {
        if (v as usize) >= p.len() {
            return Err(ModelError::BadEdge(format!("vertex {v} outside partition")));
        }
        let c = p.class_of(v);
        if seen.contains(&c) {
            return Err(ModelError::BadEdge(format!(
                "edge {:?} has two vertices in class {c}",
                e.verts()
            )));
        }
        seen.push(c);
    }
    Ok(())
}

/// A collection of `m` directed k-graphs on a common vertex set; graph `i` is color `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSystem {
    n: usize,
    k: usize,
    directed: bool,
    partition: Option<Partition>,
    graphs: Vec<DirectedKGraph>,
}

impl GraphSystem {
    pub fn new(graphs: Vec<DirectedKGraph>) -> Result<Self, ModelError> {
        let first = graphs.first().ok_or(ModelError::EmptySystem)?;
        let (n, k, directed) = (first.n, first.k, first.directed);
        let partition = first.partition.clone();
        for (i, g) in graphs.iter().enumerate() {
            if g.n != n || g.k != k || g.directed != directed || g.partition != partition {
                return Err(ModelError::SystemMismatch(i));
            }
        }
        Ok(GraphSystem {
            n,
            k,
            directed,
            partition,
            graphs,
        })
    }

    /// The system with no vertices and no colors.
    pub fn empty(k: usize) -> Self {
        GraphSystem {
            n: 0,
            k,
            directed: false,
            partition: None,
            graphs: Vec::new(),
        }
    }

    /// `m` copies of the same graph.
    pub fn replicate(g: &DirectedKGraph, m: usize) -> Result<Self, ModelError> {
        GraphSystem::new(vec![g.clone(); m])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn graph(&self, color: usize) -> &DirectedKGraph {
        &self.graphs[color]
    }

    pub fn graphs(&self) -> &[DirectedKGraph] {
        &self.graphs
    }

    pub fn graph_mut(&mut self, color: usize) -> &mut DirectedKGraph {
        &mut self.graphs[color]
    }

    /// Subsystem keeping the listed colors (renumbered in the given order).
    pub fn select_colors(&self, colors: &[usize]) -> GraphSystem {
        GraphSystem {
            n: self.n,
            k: self.k,
            directed: self.directed,
            partition: self.partition.clone(),
            graphs: colors.iter().map(|&c| self.graphs[c].clone()).collect(),
        }
    }

    /// Induced system on an increasing vertex list, relabelled to `0..keep.len()`.
    pub fn induced(&self, keep: &[Vertex]) -> GraphSystem {
        GraphSystem {
            n: keep.len(),
            k: self.k,
            directed: self.directed,
            partition: self
                .partition
                .as_ref()
                .map(|p| Partition::new(keep.iter().map(|&v| p.class_of(v)).collect())),
            graphs: self.graphs.iter().map(|g| g.induced(keep)).collect(),
        }
    }

    pub fn has_edge(&self, color: usize, e: &Edge) -> bool {
        self.graphs[color].contains(e)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<Vertex>> {
    let mut current: Option<Vec<Vertex>> = if k <= n { Some((0..k as Vertex).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        // advance
        let cur = current.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if (cur[i] as usize) < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// All `k`-subsets of a given sorted list, lexicographic.
pub fn subsets_of(items: &[Vertex], k: usize) -> impl Iterator<Item = Vec<Vertex>> + '_ {
    k_subsets(items.len(), k).map(move |idx| idx.iter().map(|&i| items[i as usize]).collect())
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcs_follow_global_order() {
        let a = Edge::arc(3, 1);
        assert_eq!(a.verts(), &[1, 3]);
        assert_eq!(a.sign(), Sign::Minus);
        assert_eq!((a.tail(), a.head()), (3, 1));
        let b = Edge::arc(1, 3);
        assert_eq!(b.sign(), Sign::Plus);
    }

    #[test]
    fn mapping_flips_sign_by_parity() {
        let e = Edge::sorted(&[0, 1, 2], Sign::Plus);
        // swap two vertices: odd
        let m = e.map(|v| [5, 4, 9][v as usize]);
        assert_eq!(m.verts(), &[4, 5, 9]);
        assert_eq!(m.sign(), Sign::Minus);
        // 3-cycle: even
        let m = e.map(|v| [7, 9, 5][v as usize]);
        assert_eq!(m.sign(), Sign::Plus);
    }

    #[test]
    fn rejects_duplicates_and_bad_edges() {
        let mut g = DirectedKGraph::undirected(4, 2).unwrap();
        g.insert(Edge::undirected(&[0, 1])).unwrap();
        assert!(matches!(
            g.insert(Edge::undirected(&[1, 0])),
            Err(ModelError::DuplicateEdge(_))
        ));
        assert!(g.insert(Edge::undirected(&[0, 4])).is_err());
        assert!(g.insert(Edge::undirected(&[2, 2])).is_err());
        assert!(g.insert(Edge::sorted(&[1, 2], Sign::Minus)).is_err());
        assert!(g.insert(Edge::undirected(&[0, 1, 2])).is_err());
    }

    #[test]
    fn partite_graphs_reject_inner_edges() {
        let p = Partition::contiguous(4, 2).unwrap();
        let mut g = DirectedKGraph::undirected(4, 2).unwrap().with_partition(p).unwrap();
        assert!(g.insert(Edge::undirected(&[0, 1])).is_err());
        g.insert(Edge::undirected(&[0, 2])).unwrap();
    }

    #[test]
    fn subsets_and_binomials() {
        let all: Vec<_> = k_subsets(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(k_subsets(3, 0).count(), 1);
        assert_eq!(k_subsets(2, 3).count(), 0);
        assert_eq!(binomial(60, 3), 34220);
        assert_eq!(binomial(5, 7), 0);
    }

    #[test]
    fn system_requires_matching_graphs() {
        let a = DirectedKGraph::undirected(4, 2).unwrap();
        let b = DirectedKGraph::undirected(5, 2).unwrap();
        assert!(matches!(
            GraphSystem::new(vec![a, b]),
            Err(ModelError::SystemMismatch(1))
        ));
        assert!(matches!(GraphSystem::new(vec![]), Err(ModelError::EmptySystem)));
    }
}
