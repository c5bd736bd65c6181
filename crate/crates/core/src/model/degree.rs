//! Generalized minimum degree rules.
//!
//! A rule assigns each d-set `S` a fixed number `ℓ` of edge families, each made
//! of edges containing `S`. The degree of `S` is the smallest family and the
//! minimum degree of a graph is the smallest such value over all d-sets.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::graph::{k_subsets, DirectedKGraph, Edge, Vertex};
use super::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// All edges containing S (ℓ = 1).
    Standard,
    /// Out-arcs of a vertex (digraphs, d = 1).
    OutDegree,
    /// In-arcs of a vertex (digraphs, d = 1).
    InDegree,
    /// In-arcs and out-arcs as two families.
    SemiDegree,
    /// One family per foreign class: edges from the vertex into that class.
    Partite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DegreeRule {
    pub d: usize,
    pub kind: RuleKind,
}

impl DegreeRule {
    pub fn standard(d: usize) -> Self {
        DegreeRule {
            d,
            kind: RuleKind::Standard,
        }
    }

    pub fn out_degree() -> Self {
        DegreeRule {
            d: 1,
            kind: RuleKind::OutDegree,
        }
    }

    pub fn in_degree() -> Self {
        DegreeRule {
            d: 1,
            kind: RuleKind::InDegree,
        }
    }

    pub fn semi_degree() -> Self {
        DegreeRule {
            d: 1,
            kind: RuleKind::SemiDegree,
        }
    }

    pub fn partite() -> Self {
        DegreeRule {
            d: 1,
            kind: RuleKind::Partite,
        }
    }

    /// Checks that the rule applies to `h`.
    pub fn check(&self, h: &DirectedKGraph) -> Result<(), ModelError> {
        if self.d == 0 || self.d >= h.k() {
            return Err(ModelError::DimensionMismatch { d: self.d, k: h.k() });
        }
        match self.kind {
            RuleKind::Standard => Ok(()),
            RuleKind::OutDegree | RuleKind::InDegree | RuleKind::SemiDegree => {
                if h.k() != 2 {
                    return Err(ModelError::UnsupportedRule(format!(
                        "{:?} needs a 2-graph, got k = {}",
                        self.kind,
                        h.k()
                    )));
                }
                Ok(())
            }
            RuleKind::Partite => {
                let p = h.partition().ok_or(ModelError::NotPartite)?;
                if h.k() != 2 || p.num_classes() < 2 {
                    return Err(ModelError::UnsupportedRule(
                        "partite degree needs a 2-graph with at least two classes".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Number of families `ℓ` this rule uses on `h`.
    pub fn num_families(&self, h: &DirectedKGraph) -> usize {
        match self.kind {
            RuleKind::Standard | RuleKind::OutDegree | RuleKind::InDegree => 1,
            RuleKind::SemiDegree => 2,
            RuleKind::Partite => h.partition().map_or(1, |p| p.num_classes() - 1),
        }
    }

    /// The families `E_1, …, E_ℓ` of a d-set `s` (sorted).
    pub fn families(&self, h: &DirectedKGraph, s: &[Vertex]) -> Result<Vec<Vec<Edge>>, ModelError> {
        self.check(h)?;
        let mut fams = vec![Vec::new(); self.num_families(h)];
        for e in h.edges() {
            if s.iter().all(|&v| e.contains(v)) {
                for (set, idx) in self.keys_of_edge(h, e) {
                    if set == s {
                        fams[idx].push(e.clone());
                    }
                }
            }
        }
        Ok(fams)
    }

    /// For an edge, every `(d-set, family index)` it is counted in.
    pub fn keys_of_edge(&self, h: &DirectedKGraph, e: &Edge) -> Vec<(Vec<Vertex>, usize)> {
        match self.kind {
            RuleKind::Standard => k_subsets(e.len(), self.d)
                .map(|idx| (idx.iter().map(|&i| e.verts()[i as usize]).collect(), 0))
                .collect(),
            RuleKind::OutDegree => vec![(vec![e.tail()], 0)],
            RuleKind::InDegree => vec![(vec![e.head()], 0)],
            // family 0: in-arcs, family 1: out-arcs
            RuleKind::SemiDegree => vec![(vec![e.head()], 0), (vec![e.tail()], 1)],
            RuleKind::Partite => {
                let p = h.partition().expect("checked partite");
                let (a, b) = (e.verts()[0], e.verts()[1]);
                vec![
                    (vec![a], foreign_index(p.class_of(a), p.class_of(b))),
                    (vec![b], foreign_index(p.class_of(b), p.class_of(a))),
                ]
            }
        }
    }

    /// Family sizes for every d-set (absent d-sets have all-zero families).
    pub fn family_counts(&self, h: &DirectedKGraph) -> HashMap<Vec<Vertex>, Vec<usize>> {
        let l = self.num_families(h);
        let mut counts: HashMap<Vec<Vertex>, Vec<usize>> = HashMap::new();
        for e in h.edges() {
            for (set, idx) in self.keys_of_edge(h, e) {
                counts.entry(set).or_insert_with(|| vec![0; l])[idx] += 1;
            }
        }
        counts
    }
}

/// Index of class `other` among the classes different from `own`.
pub(crate) fn foreign_index(own: usize, other: usize) -> usize {
    if other < own {
        other
    } else {
        other - 1
    }
}

impl fmt::Display for DegreeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RuleKind::Standard => write!(f, "standard:{}", self.d),
            RuleKind::OutDegree => write!(f, "out"),
            RuleKind::InDegree => write!(f, "in"),
            RuleKind::SemiDegree => write!(f, "semi"),
            RuleKind::Partite => write!(f, "partite"),
        }
    }
}

impl FromStr for DegreeRule {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "out" => Ok(DegreeRule::out_degree()),
            "in" => Ok(DegreeRule::in_degree()),
            "semi" => Ok(DegreeRule::semi_degree()),
            "partite" => Ok(DegreeRule::partite()),
            "standard" => Ok(DegreeRule::standard(1)),
            other => match other.strip_prefix("standard:") {
                Some(d) => d
                    .parse()
                    .map(DegreeRule::standard)
                    .map_err(|_| ModelError::UnsupportedRule(format!("bad degree order '{d}'"))),
                None => Err(ModelError::UnsupportedRule(format!("unknown rule '{other}'"))),
            },
        }
    }
}

/// `δ*_d(H)`: the minimum over all d-sets of the smallest family size.
pub fn min_star_degree(h: &DirectedKGraph, rule: &DegreeRule) -> Result<usize, ModelError> {
    rule.check(h)?;
    let counts = rule.family_counts(h);
    let l = rule.num_families(h);
    let mut best = usize::MAX;
    for s in k_subsets(h.n(), rule.d) {
        let m = counts
            .get(&s)
            .map_or(0, |c| *c.iter().min().expect("at least one family"));
        best = best.min(m);
        if best == 0 {
            break;
        }
    }
    debug_assert!(l >= 1);
    Ok(if best == usize::MAX { 0 } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::graph::Partition;

    #[test]
    fn complete_graph_degree() {
        let k4 = DirectedKGraph::complete(4, 2).unwrap();
        assert_eq!(min_star_degree(&k4, &DegreeRule::standard(1)).unwrap(), 3);
    }

    #[test]
    fn directed_cycle_out_degree() {
        let c3 = DirectedKGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(min_star_degree(&c3, &DegreeRule::out_degree()).unwrap(), 1);
        assert_eq!(min_star_degree(&c3, &DegreeRule::in_degree()).unwrap(), 1);
        assert_eq!(min_star_degree(&c3, &DegreeRule::semi_degree()).unwrap(), 1);
    }

    #[test]
    fn complete_three_graph() {
        let h = DirectedKGraph::complete(5, 3).unwrap();
        assert_eq!(min_star_degree(&h, &DegreeRule::standard(1)).unwrap(), 6);
        assert_eq!(min_star_degree(&h, &DegreeRule::standard(2)).unwrap(), 3);
    }

    #[test]
    fn dimension_errors() {
        let h = DirectedKGraph::complete(5, 3).unwrap();
        assert!(matches!(
            min_star_degree(&h, &DegreeRule::standard(3)),
            Err(ModelError::DimensionMismatch { .. })
        ));
        let g = DirectedKGraph::complete(4, 2).unwrap();
        assert!(matches!(
            min_star_degree(&g, &DegreeRule::partite()),
            Err(ModelError::NotPartite)
        ));
    }

    #[test]
    fn partite_degree_counts_each_foreign_class() {
        // three classes of two; vertex 0 sees both of class 1 and one of class 2
        let p = Partition::contiguous(6, 3).unwrap();
        let mut g = DirectedKGraph::undirected(6, 2).unwrap().with_partition(p).unwrap();
        for (a, b) in [(0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (1, 5), (2, 4), (3, 5)] {
            g.insert(Edge::undirected(&[a, b])).unwrap();
        }
        let rule = DegreeRule::partite();
        assert_eq!(rule.num_families(&g), 2);
        let fams = rule.families(&g, &[0]).unwrap();
        assert_eq!(fams[0].len(), 2);
        assert_eq!(fams[1].len(), 1);
        assert_eq!(min_star_degree(&g, &rule).unwrap(), 1);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("semi".parse::<DegreeRule>().unwrap(), DegreeRule::semi_degree());
        assert_eq!("standard:2".parse::<DegreeRule>().unwrap(), DegreeRule::standard(2));
        assert!("weird".parse::<DegreeRule>().is_err());
    }
}
