//! Pattern templates `F`: the small (di)graphs whose rainbow factors we look for.

use std::fmt;
use std::str::FromStr;

use super::graph::{k_subsets, DirectedKGraph, Edge, Sign, Vertex};
use super::ModelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternKind {
    /// One undirected k-edge.
    SingleEdge(usize),
    /// Undirected `K_t`.
    Clique(usize),
    /// Transitive tournament `T_t`, arcs `i -> j` for `i < j`.
    TransitiveTournament(usize),
    /// Arbitrary tournament given by its arcs.
    Tournament(Vec<(Vertex, Vertex)>),
    /// `K_k` inside a k-partite host.
    PartiteClique(usize),
}

/// A pattern `F` with `b` vertices and `f` edges. Template edges are kept in
/// lexicographic order; edge `j` of the template is the `j`-th entry of a copy's
/// color tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternF {
    kind: PatternKind,
    template: DirectedKGraph,
    edges: Vec<Edge>,
    automorphisms: Vec<Vec<Vertex>>,
    placements: Vec<Vec<Vertex>>,
}

impl PatternF {
    pub fn single_edge(k: usize) -> Result<Self, ModelError> {
        let t = DirectedKGraph::from_edges(k, k, [(0..k as Vertex).collect()])?;
        Ok(Self::build(PatternKind::SingleEdge(k), t))
    }

    pub fn clique(t: usize) -> Result<Self, ModelError> {
        if t < 2 {
            return Err(ModelError::BadPattern(format!("clique needs t >= 2, got {t}")));
        }
        Ok(Self::build(PatternKind::Clique(t), DirectedKGraph::complete(t, 2)?))
    }

    pub fn partite_clique(k: usize) -> Result<Self, ModelError> {
        if k < 2 {
            return Err(ModelError::BadPattern(format!("partite clique needs k >= 2, got {k}")));
        }
        Ok(Self::build(
            PatternKind::PartiteClique(k),
            DirectedKGraph::complete(k, 2)?,
        ))
    }

    pub fn transitive_tournament(t: usize) -> Result<Self, ModelError> {
        if t < 2 {
            return Err(ModelError::BadPattern(format!("tournament needs t >= 2, got {t}")));
        }
        let arcs = k_subsets(t, 2).map(|p| (p[0], p[1]));
        Ok(Self::build(
            PatternKind::TransitiveTournament(t),
            DirectedKGraph::from_arcs(t, arcs)?,
        ))
    }

    /// A tournament from its arc list; every pair must carry exactly one arc.
    pub fn tournament(arcs: Vec<(Vertex, Vertex)>) -> Result<Self, ModelError> {
        let b = arcs.iter().map(|&(a, c)| a.max(c) as usize + 1).max().unwrap_or(0);
        if b < 2 || arcs.len() != b * (b - 1) / 2 {
            return Err(ModelError::BadPattern(format!(
                "a tournament on {b} vertices needs {} arcs, got {}",
                b * b.saturating_sub(1) / 2,
                arcs.len()
            )));
        }
        let mut pairs = std::collections::HashSet::new();
        for &(a, c) in &arcs {
            if a == c || !pairs.insert((a.min(c), a.max(c))) {
                return Err(ModelError::BadPattern(format!("bad or repeated pair {a},{c}")));
            }
        }
        let t = DirectedKGraph::from_arcs(b, arcs.iter().copied())?;
        Ok(Self::build(PatternKind::Tournament(arcs), t))
    }

    fn build(kind: PatternKind, template: DirectedKGraph) -> Self {
        let edges: Vec<Edge> = template.edges().cloned().collect();
        let automorphisms = automorphisms(&template, &edges);
        let placements = placements(template.n(), &automorphisms);
        PatternF {
            kind,
            template,
            edges,
            automorphisms,
            placements,
        }
    }

    pub fn kind(&self) -> &PatternKind {
        &self.kind
    }

    /// Number of vertices.
    pub fn b(&self) -> usize {
        self.template.n()
    }

    /// Number of edges.
    pub fn f(&self) -> usize {
        self.edges.len()
    }

    pub fn k(&self) -> usize {
        self.template.k()
    }

    pub fn is_directed(&self) -> bool {
        self.template.is_directed()
    }

    pub fn is_partite(&self) -> bool {
        matches!(self.kind, PatternKind::PartiteClique(_))
    }

    pub fn template(&self) -> &DirectedKGraph {
        &self.template
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertex permutations preserving the signed edge set (identity included).
    pub fn automorphisms(&self) -> &[Vec<Vertex>] {
        &self.automorphisms
    }

    /// Ways to place the template on a sorted b-set, as index orders: template
    /// vertex `i` goes to the `order[i]`-th smallest vertex. One order per
    /// automorphism class (the lexicographically least), in increasing order.
    pub fn placements(&self) -> &[Vec<Vertex>] {
        &self.placements
    }

    /// Whether every vertex permutation is an automorphism.
    pub fn is_fully_symmetric(&self) -> bool {
        let b = self.b();
        self.automorphisms.len() == (1..=b).product::<usize>()
    }

    /// Whether the pattern is a complete (di)graph, i.e. usable with the
    /// clique absorber gadget.
    pub fn is_complete_pattern(&self) -> bool {
        matches!(
            self.kind,
            PatternKind::Clique(_)
                | PatternKind::TransitiveTournament(_)
                | PatternKind::Tournament(_)
                | PatternKind::PartiteClique(_)
        )
    }

    /// Host edge that template edge `j` lands on under `embedding`.
    pub fn host_edge(&self, j: usize, embedding: &[Vertex]) -> Edge {
        let e = self.edges[j].map(|v| embedding[v as usize]);
        if self.is_directed() {
            e
        } else {
            e.with_sign(Sign::Plus)
        }
    }
}

fn automorphisms(template: &DirectedKGraph, edges: &[Edge]) -> Vec<Vec<Vertex>> {
    let b = template.n();
    let mut out = Vec::new();
    let mut perm: Vec<Vertex> = (0..b as Vertex).collect();
    heap_permutations(&mut perm, b, &mut |p| {
        let ok = edges.iter().all(|e| {
            let m = e.map(|v| p[v as usize]);
            if template.is_directed() {
                template.contains(&m)
            } else {
                template.contains(&m.with_sign(Sign::Plus))
            }
        });
        if ok {
            out.push(p.to_vec());
        }
    });
    out.sort();
    out
}

fn placements(b: usize, auts: &[Vec<Vertex>]) -> Vec<Vec<Vertex>> {
    let mut all = Vec::new();
    let mut perm: Vec<Vertex> = (0..b as Vertex).collect();
    heap_permutations(&mut perm, b, &mut |p| all.push(p.to_vec()));
    all.sort();
    all.into_iter()
        .filter(|p| {
            auts.iter().all(|sigma| {
                let q: Vec<Vertex> = (0..b).map(|i| p[sigma[i] as usize]).collect();
                *p <= q
            })
        })
        .collect()
}

fn heap_permutations(a: &mut [Vertex], k: usize, visit: &mut impl FnMut(&[Vertex])) {
    if k <= 1 {
        visit(a);
        return;
    }
    for i in 0..k {
        heap_permutations(a, k - 1, visit);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

impl fmt::Display for PatternF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PatternKind::SingleEdge(k) => write!(f, "edge:{k}"),
            PatternKind::Clique(t) => write!(f, "clique:{t}"),
            PatternKind::TransitiveTournament(t) => write!(f, "ttour:{t}"),
            PatternKind::PartiteClique(k) => write!(f, "pclique:{k}"),
            PatternKind::Tournament(arcs) => {
                let parts: Vec<String> = arcs.iter().map(|(a, b)| format!("{a}>{b}")).collect();
                write!(f, "tour:{}", parts.join(","))
            }
        }
    }
}

/// Parses `clique:t`, `ttour:k`, `tour:0>1,1>2,2>0`, `edge:k` and `pclique:k`.
impl FromStr for PatternF {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| ModelError::BadPattern(format!("expected name:arg, got '{s}'")))?;
        let num = || {
            arg.trim()
                .parse::<usize>()
                .map_err(|_| ModelError::BadPattern(format!("bad size '{arg}'")))
        };
        match name.trim() {
            "clique" => PatternF::clique(num()?),
            "ttour" => PatternF::transitive_tournament(num()?),
            "edge" => PatternF::single_edge(num()?),
            "pclique" => PatternF::partite_clique(num()?),
            "tour" => {
                let mut arcs = Vec::new();
                for part in arg.split(',') {
                    let (a, b) = part
                        .split_once('>')
                        .ok_or_else(|| ModelError::BadPattern(format!("arc '{part}' is not of the form a>b")))?;
                    let parse = |x: &str| {
                        x.trim()
                            .parse::<Vertex>()
                            .map_err(|_| ModelError::BadPattern(format!("bad vertex '{x}'")))
                    };
                    arcs.push((parse(a)?, parse(b)?));
                }
                PatternF::tournament(arcs)
            }
            other => Err(ModelError::BadPattern(format!("unknown pattern '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_kind() {
        let k3 = PatternF::clique(3).unwrap();
        assert_eq!((k3.b(), k3.f()), (3, 3));
        let k4 = PatternF::clique(4).unwrap();
        assert_eq!((k4.b(), k4.f()), (4, 6));
        let e = PatternF::single_edge(3).unwrap();
        assert_eq!((e.b(), e.f(), e.k()), (3, 1, 3));
    }

    #[test]
    fn automorphism_groups() {
        assert_eq!(PatternF::clique(3).unwrap().automorphisms().len(), 6);
        assert!(PatternF::clique(4).unwrap().is_fully_symmetric());
        assert_eq!(PatternF::transitive_tournament(3).unwrap().automorphisms().len(), 1);
        // cyclic triangle has the rotations
        let c3 = PatternF::tournament(vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(c3.automorphisms().len(), 3);
    }

    #[test]
    fn placements_count_orbits() {
        assert_eq!(PatternF::clique(4).unwrap().placements(), &[vec![0, 1, 2, 3]]);
        assert_eq!(PatternF::transitive_tournament(3).unwrap().placements().len(), 6);
        let c3 = PatternF::tournament(vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(c3.placements().len(), 2);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["clique:3", "ttour:4", "edge:3", "pclique:3", "tour:0>1,1>2,2>0"] {
            let p: PatternF = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("tour:0>1".parse::<PatternF>().is_ok());
        assert!("tour:0>1,1>0".parse::<PatternF>().is_err());
        assert!("blob:3".parse::<PatternF>().is_err());
    }

    #[test]
    fn host_edges_translate_direction() {
        let t = PatternF::transitive_tournament(2).unwrap();
        // template arc 0 -> 1; embed 0 at 5, 1 at 2: host arc 5 -> 2
        let e = t.host_edge(0, &[5, 2]);
        assert_eq!((e.tail(), e.head()), (5, 2));
    }
}
