//! k-complexes, their degree sequences and the greedy low-index edge used to
//! show that a large degree sequence forces a perfect fractional matching.

use std::collections::BTreeSet;

use crate::model::rainbow::first_copy_on_set;
use crate::model::{GraphSystem, Partition, PatternF, Vertex};

use super::hypergraph::Hypergraph;
use super::matching::{has_perfect_fractional_matching, FarkasCertificate, FractionalSolution};
use super::LpError;

/// A downward-closed family of sets of size at most `k`; `levels[r]` holds the
/// sorted r-sets, and `levels[0]` is `{∅}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    n: usize,
    k: usize,
    levels: Vec<BTreeSet<Vec<Vertex>>>,
    partition: Option<Partition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexMode {
    Uniform,
    Partite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliqueKind {
    /// Rainbow transitive tournaments in a digraph slice.
    Directed,
    /// Rainbow cliques in an undirected slice.
    Undirected,
    /// Rainbow cliques in a k-partite slice.
    Partite,
}

impl Complex {
    /// Builds a complex from its levels (`levels.len() == k + 1`), checking
    /// sizes, ranges and downward closure.
    pub fn new(n: usize, levels: Vec<BTreeSet<Vec<Vertex>>>, partition: Option<Partition>) -> Result<Self, LpError> {
        if levels.is_empty() {
            return Err(LpError::BadComplex("no levels".into()));
        }
        let k = levels.len() - 1;
        if levels[0].len() != 1 || !levels[0].contains(&Vec::new()) {
            return Err(LpError::BadComplex("level 0 must be exactly {∅}".into()));
        }
        for (r, level) in levels.iter().enumerate().skip(1) {
            for e in level {
                if e.len() != r || e.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(LpError::BadComplex(format!("{e:?} is not a sorted {r}-set")));
                }
                if e.last().is_some_and(|&v| v as usize >= n) {
                    return Err(LpError::BadComplex(format!("{e:?} leaves 0..{n}")));
                }
                for skip in 0..r {
                    let mut sub = e.clone();
                    sub.remove(skip);
                    if !levels[r - 1].contains(&sub) {
                        return Err(LpError::BadComplex(format!("{sub:?} missing below {e:?}")));
                    }
                }
                if let Some(p) = &partition {
                    let mut classes: Vec<usize> = e.iter().map(|&v| p.class_of(v)).collect();
                    classes.sort_unstable();
                    if classes.windows(2).any(|w| w[0] == w[1]) {
                        return Err(LpError::BadComplex(format!("{e:?} is not partite")));
                    }
                }
            }
        }
        if let Some(p) = &partition {
            if p.len() != n {
                return Err(LpError::BadComplex("partition size differs from n".into()));
            }
        }
        Ok(Complex {
            n,
            k,
            levels,
            partition,
        })
    }

    /// The downward closure of a family of k-sets, with every vertex present
    /// as a 1-edge.
    pub fn from_top(
        n: usize,
        k: usize,
        top: impl IntoIterator<Item = Vec<Vertex>>,
        partition: Option<Partition>,
    ) -> Result<Self, LpError> {
        let mut levels = vec![BTreeSet::new(); k + 1];
        levels[0].insert(Vec::new());
        if k >= 1 {
            for v in 0..n as Vertex {
                levels[1].insert(vec![v]);
            }
        }
        for mut e in top {
            e.sort_unstable();
            if e.len() != k {
                return Err(LpError::BadComplex(format!("{e:?} is not a {k}-set")));
            }
            levels[k].insert(e);
        }
        for r in (2..k).rev() {
            let below: Vec<Vec<Vertex>> = levels[r + 1]
                .iter()
                .flat_map(|e| {
                    (0..e.len()).map(move |s| {
                        let mut sub = e.clone();
                        sub.remove(s);
                        sub
                    })
                })
                .collect();
            levels[r].extend(below);
        }
        Complex::new(n, levels, partition)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn level(&self, r: usize) -> &BTreeSet<Vec<Vertex>> {
        &self.levels[r]
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn contains(&self, e: &[Vertex]) -> bool {
        let mut s = e.to_vec();
        s.sort_unstable();
        self.levels.get(s.len()).is_some_and(|l| l.contains(&s))
    }

    /// The top level `J_k` as a hypergraph.
    pub fn top(&self) -> Hypergraph {
        Hypergraph::new(self.n, self.levels[self.k].iter().cloned().collect()).expect("levels are validated")
    }

    /// Vertices `v` with `e ∪ {v}` in the complex.
    fn extensions<'a>(&'a self, e: &'a [Vertex]) -> impl Iterator<Item = Vertex> + 'a {
        (0..self.n as Vertex).filter(move |v| {
            if e.contains(v) {
                return false;
            }
            let mut s = e.to_vec();
            s.push(*v);
            s.sort_unstable();
            self.levels[e.len() + 1].contains(&s)
        })
    }
}

/// The clique complex of a slice with `C(k, 2)` colors: level `r` holds the
/// r-sets spanning a rainbow `T_r` (or `K_r`) whose colors are distinct
/// colors of the slice.
pub fn clique_complex(slice: &GraphSystem, k: usize, kind: CliqueKind) -> Result<Complex, LpError> {
    if slice.m() != k * (k - 1) / 2 {
        return Err(LpError::SliceSize {
            expected: k * (k - 1) / 2,
            got: slice.m(),
        });
    }
    let partition = match kind {
        CliqueKind::Partite => Some(slice.partition().cloned().ok_or(LpError::NotPartite)?),
        _ => None,
    };
    let n = slice.n();
    let palette: Vec<usize> = (0..slice.m()).collect();
    let mut levels = vec![BTreeSet::new(); k + 1];
    levels[0].insert(Vec::new());
    for v in 0..n as Vertex {
        levels[1].insert(vec![v]);
    }
    for r in 2..=k {
        let pattern = match kind {
            CliqueKind::Directed => PatternF::transitive_tournament(r),
            CliqueKind::Undirected | CliqueKind::Partite => PatternF::clique(r),
        }
        .map_err(|e| LpError::BadComplex(e.to_string()))?;
        let mut next = BTreeSet::new();
        for e in &levels[r - 1] {
            let last = *e.last().expect("r - 1 >= 1");
            for v in last + 1..n as Vertex {
                let mut s = e.clone();
                s.push(v);
                let closed = (0..r - 1).all(|skip| {
                    let mut sub = s.clone();
                    sub.remove(skip);
                    levels[r - 1].contains(&sub)
                });
                if closed && first_copy_on_set(slice, &pattern, &s, &palette).is_some() {
                    next.insert(s);
                }
            }
        }
        levels[r] = next;
    }
    Complex::new(n, levels, partition)
}

/// `(δ_0, …, δ_{k-1})`. In partite mode entry `j` is the partite minimum
/// j-degree: the fewest extensions of a j-edge into a class it misses.
/// Levels without edges give 0.
pub fn degree_sequence(j: &Complex, mode: ComplexMode) -> Result<Vec<usize>, LpError> {
    let partition = match mode {
        ComplexMode::Partite => Some(j.partition().ok_or(LpError::NotPartite)?),
        ComplexMode::Uniform => None,
    };
    let mut out = Vec::with_capacity(j.k());
    for r in 0..j.k() {
        let mut best: Option<usize> = None;
        for e in j.level(r) {
            let d = match partition {
                None => j.extensions(e).count(),
                Some(p) => {
                    let mut per_class = vec![0usize; p.num_classes()];
                    for v in j.extensions(e) {
                        per_class[p.class_of(v)] += 1;
                    }
                    let used: Vec<usize> = e.iter().map(|&v| p.class_of(v)).collect();
                    (0..p.num_classes())
                        .filter(|c| !used.contains(c))
                        .map(|c| per_class[c])
                        .min()
                        .unwrap_or(0)
                }
            };
            best = Some(best.map_or(d, |b| b.min(d)));
        }
        out.push(best.unwrap_or(0));
    }
    Ok(out)
}

/// Whether `seq[r] >= (k - r) n / k` for all `r < k`, with `n` the vertex
/// count (uniform) or the class size (partite).
pub fn meets_degree_bound(seq: &[usize], k: usize, n: usize) -> bool {
    seq.iter().enumerate().all(|(r, &d)| k * d >= (k - r) * n)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GreedyError {
    #[error("no admissible extension of {prefix:?}")]
    Stuck { prefix: Vec<Vertex> },
    #[error("vertex {vertex} of rank {rank} after {prefix:?} exceeds the rank bound")]
    BoundExceeded {
        prefix: Vec<Vertex>,
        vertex: Vertex,
        rank: usize,
    },
    #[error("bad ranking: {0}")]
    BadRanking(String),
}

/// Builds a k-edge greedily: each step adds the lowest-ranked vertex that
/// keeps the set in the complex. `ranking[i]` is the vertex of rank `i + 1`.
/// The j-th chosen vertex must have rank at most `(j - 1) n / k + 1`.
pub fn greedy_low_index_edge(j: &Complex, ranking: &[Vertex]) -> Result<Vec<Vertex>, GreedyError> {
    let n = j.n();
    let rank = rank_table(ranking, n)?;
    let k = j.k();
    let mut edge: Vec<Vertex> = Vec::with_capacity(k);
    for step in 0..k {
        let pick = j
            .extensions(&edge)
            .min_by_key(|&v| rank[v as usize])
            .ok_or_else(|| GreedyError::Stuck { prefix: edge.clone() })?;
        let r = rank[pick as usize];
        // rank <= step * n / k + 1
        if k * (r - 1) > step * n {
            return Err(GreedyError::BoundExceeded {
                prefix: edge,
                vertex: pick,
                rank: r,
            });
        }
        edge.push(pick);
    }
    Ok(edge)
}

/// Partite version: the j-th vertex comes from class `j`, ranked within its
/// class by `rankings[j]`, with the bound taken against the class size.
pub fn greedy_low_index_edge_partite(j: &Complex, rankings: &[Vec<Vertex>]) -> Result<Vec<Vertex>, GreedyError> {
    let p = j
        .partition()
        .ok_or_else(|| GreedyError::BadRanking("complex has no partition".into()))?;
    let k = j.k();
    if rankings.len() != k || p.num_classes() != k {
        return Err(GreedyError::BadRanking(format!(
            "need one ranking per class ({k}), got {}",
            rankings.len()
        )));
    }
    let class_size = p.len() / k;
    let mut rank = vec![usize::MAX; j.n()];
    for (c, order) in rankings.iter().enumerate() {
        if order.len() != class_size {
            return Err(GreedyError::BadRanking(format!("class {c} ranking has wrong length")));
        }
        for (i, &v) in order.iter().enumerate() {
            if v as usize >= j.n() || p.class_of(v) != c || rank[v as usize] != usize::MAX {
                return Err(GreedyError::BadRanking(format!("vertex {v} misplaced in class {c}")));
            }
            rank[v as usize] = i + 1;
        }
    }
    let mut edge: Vec<Vertex> = Vec::with_capacity(k);
    for step in 0..k {
        let pick = j
            .extensions(&edge)
            .filter(|&v| p.class_of(v) == step)
            .min_by_key(|&v| rank[v as usize])
            .ok_or_else(|| GreedyError::Stuck { prefix: edge.clone() })?;
        let r = rank[pick as usize];
        if k * (r - 1) > step * class_size {
            return Err(GreedyError::BoundExceeded {
                prefix: edge,
                vertex: pick,
                rank: r,
            });
        }
        edge.push(pick);
    }
    Ok(edge)
}

fn rank_table(ranking: &[Vertex], n: usize) -> Result<Vec<usize>, GreedyError> {
    if ranking.len() != n {
        return Err(GreedyError::BadRanking(format!(
            "{} entries for {n} vertices",
            ranking.len()
        )));
    }
    let mut rank = vec![usize::MAX; n];
    for (i, &v) in ranking.iter().enumerate() {
        if v as usize >= n || rank[v as usize] != usize::MAX {
            return Err(GreedyError::BadRanking(format!("vertex {v} repeated or out of range")));
        }
        rank[v as usize] = i + 1;
    }
    Ok(rank)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeCheck {
    pub sequence: Vec<usize>,
    pub meets_bound: bool,
    pub perfect: bool,
    pub matching: FractionalSolution,
    pub certificate: Option<FarkasCertificate>,
}

/// Computes the degree sequence, compares it with `(n, (k-1)n/k, …, n/k)` and
/// solves the perfect fractional matching problem on `J_k`. A complex that
/// meets the bound without a perfect fractional matching is reported as an
/// error.
pub fn check_degree_sequence_pfm(j: &Complex, mode: ComplexMode) -> Result<DegreeCheck, LpError> {
    let sequence = degree_sequence(j, mode)?;
    let n = match mode {
        ComplexMode::Uniform => j.n(),
        ComplexMode::Partite => j.n() / j.k().max(1),
    };
    let meets_bound = meets_degree_bound(&sequence, j.k(), n);
    let out = has_perfect_fractional_matching(&j.top(), j.k())?;
    if meets_bound && !out.perfect {
        return Err(LpError::BoundWithoutPfm(sequence));
    }
    Ok(DegreeCheck {
        sequence,
        meets_bound,
        perfect: out.perfect,
        matching: out.matching,
        certificate: out.certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{k_subsets, DirectedKGraph};

    fn complete(n: usize, k: usize) -> Complex {
        Complex::from_top(n, k, k_subsets(n, k), None).unwrap()
    }

    #[test]
    fn complete_complex_sequence() {
        assert_eq!(
            degree_sequence(&complete(5, 2), ComplexMode::Uniform).unwrap(),
            vec![5, 4]
        );
        assert_eq!(
            degree_sequence(&complete(6, 3), ComplexMode::Uniform).unwrap(),
            vec![6, 5, 4]
        );
    }

    #[test]
    fn k4_clique_complex() {
        let k4 = DirectedKGraph::complete(4, 2).unwrap();
        let slice = GraphSystem::replicate(&k4, 3).unwrap();
        let j = clique_complex(&slice, 3, CliqueKind::Undirected).unwrap();
        assert_eq!(j.level(3).len(), 4);
        assert_eq!(degree_sequence(&j, ComplexMode::Uniform).unwrap(), vec![4, 3, 2]);
    }

    #[test]
    fn directed_clique_complex() {
        let d = DirectedKGraph::complete_digraph(4).unwrap();
        let slice = GraphSystem::replicate(&d, 3).unwrap();
        let j = clique_complex(&slice, 3, CliqueKind::Directed).unwrap();
        assert_eq!(j.level(3).len(), 4);
        let g = DirectedKGraph::from_edges(4, 2, [vec![0, 1], vec![2, 3]]).unwrap();
        let j = clique_complex(&GraphSystem::replicate(&g, 1).unwrap(), 2, CliqueKind::Undirected).unwrap();
        assert_eq!(j.level(1).len(), 4);
        assert_eq!(j.level(2).len(), 2);
        assert!(clique_complex(&slice, 2, CliqueKind::Directed).is_err());
    }

    #[test]
    fn isolated_vertex_zeroes_degree() {
        let j = Complex::from_top(3, 2, vec![vec![0, 1]], None).unwrap();
        assert_eq!(degree_sequence(&j, ComplexMode::Uniform).unwrap(), vec![3, 0]);
    }

    #[test]
    fn greedy_on_complete_complex() {
        let j = complete(6, 3);
        let ranking: Vec<Vertex> = (0..6).collect();
        assert_eq!(greedy_low_index_edge(&j, &ranking).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn greedy_on_four_cycle() {
        let j = Complex::from_top(4, 2, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], None).unwrap();
        assert_eq!(greedy_low_index_edge(&j, &[0, 1, 2, 3]).unwrap(), vec![0, 1]);
        let j = Complex::from_top(4, 2, vec![vec![0, 2], vec![1, 2], vec![1, 3], vec![0, 3]], None).unwrap();
        assert_eq!(greedy_low_index_edge(&j, &[0, 1, 2, 3]).unwrap(), vec![0, 2]);
    }

    #[test]
    fn greedy_reports_stuck_prefix() {
        let j = Complex::from_top(3, 2, vec![vec![1, 2]], None).unwrap();
        assert_eq!(
            greedy_low_index_edge(&j, &[0, 1, 2]),
            Err(GreedyError::Stuck { prefix: vec![0] })
        );
    }

    #[test]
    fn pfm_checks() {
        let ok = check_degree_sequence_pfm(&complete(6, 3), ComplexMode::Uniform).unwrap();
        assert!(ok.meets_bound && ok.perfect);
        let path = Complex::from_top(3, 2, vec![vec![0, 1], vec![1, 2]], None).unwrap();
        let out = check_degree_sequence_pfm(&path, ComplexMode::Uniform).unwrap();
        assert!(!out.meets_bound && !out.perfect);
        assert!(out.certificate.unwrap().verify(&path.top()));
    }

    #[test]
    fn partite_sequence() {
        let p = Partition::contiguous(4, 2).unwrap();
        let j = Complex::from_top(4, 2, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]], Some(p)).unwrap();
        assert_eq!(degree_sequence(&j, ComplexMode::Partite).unwrap(), vec![2, 2]);
        let out = check_degree_sequence_pfm(&j, ComplexMode::Partite).unwrap();
        assert!(out.meets_bound && out.perfect);
        let e = greedy_low_index_edge_partite(&j, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(e, vec![0, 2]);
    }

    #[test]
    fn rejects_open_families() {
        let mut levels = vec![BTreeSet::new(); 3];
        levels[0].insert(vec![]);
        levels[1].insert(vec![0]);
        levels[2].insert(vec![0, 1]);
        assert!(Complex::new(2, levels, None).is_err());
    }
}
