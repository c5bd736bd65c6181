//! Instance generators: the extremal space-barrier family, random systems
//! with a prescribed minimum degree, and complete systems.

use std::collections::HashMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    binomial, io::parse_instance, k_subsets, min_star_degree, DegreeRule, DirectedKGraph, Edge, GraphSystem,
    ModelError, Partition, PatternF, RuleKind, Vertex,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{t} does not divide {n}")]
    Divisibility { t: usize, n: usize },
    #[error("minimum degree {target} is out of reach, the host allows at most {max}")]
    Degree { target: usize, max: usize },
    #[error("cannot read instance: {0}")]
    Io(String),
    #[error("missing parameter: {0}")]
    Missing(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    /// Same oversized independent class in every color, rest partitioned at random per color.
    ExtremalSpace,
    /// Every color is the same space-barrier graph.
    IdenticalExtremal,
    RandomMinDegree,
    Complete,
    FromFile,
}

impl std::str::FromStr for InstanceKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "extremal-space" | "space" => InstanceKind::ExtremalSpace,
            "identical-extremal" | "extremal" => InstanceKind::IdenticalExtremal,
            "random-min-degree" | "random" => InstanceKind::RandomMinDegree,
            "complete" => InstanceKind::Complete,
            "from-file" | "file" => InstanceKind::FromFile,
            _ => return Err(GenError::Missing("a known instance kind")),
        })
    }
}

/// Everything needed to rebuild an instance.
#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub n: usize,
    pub pattern: PatternF,
    /// Defaults to `n f / b`.
    pub m: Option<usize>,
    pub rule: DegreeRule,
    /// Target minimum degree for random systems; defaults to the host maximum.
    pub delta: Option<usize>,
    pub delete_prob: f64,
    /// Number of vertex classes for partite hosts.
    pub parts: Option<usize>,
    pub path: Option<PathBuf>,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, n: usize, pattern: PatternF, seed: u64) -> Self {
        let rule = default_rule(&pattern);
        InstanceSpec {
            kind,
            n,
            pattern,
            m: None,
            rule,
            delta: None,
            delete_prob: 1.0,
            parts: None,
            path: None,
            seed,
        }
    }

    fn colors(&self) -> usize {
        self.m.unwrap_or(self.n / self.pattern.b() * self.pattern.f())
    }
}

/// The degree rule that matches a pattern's host type.
pub fn default_rule(pattern: &PatternF) -> DegreeRule {
    if pattern.is_directed() {
        DegreeRule::semi_degree()
    } else if pattern.is_partite() && pattern.k() == 2 {
        DegreeRule::partite()
    } else {
        DegreeRule::standard(1)
    }
}

pub fn generate(spec: &InstanceSpec) -> Result<GraphSystem, GenError> {
    match spec.kind {
        InstanceKind::ExtremalSpace | InstanceKind::IdenticalExtremal => {
            let t = spec.pattern.b();
            gen_extremal(t, spec.n, spec.kind, spec.seed)
        }
        InstanceKind::Complete => {
            let host = complete_host(spec.n, spec.pattern.k(), &spec.rule, host_parts(spec))?;
            Ok(GraphSystem::replicate(&host, spec.colors())?)
        }
        InstanceKind::RandomMinDegree => gen_random_min_degree_with(
            spec.n,
            spec.pattern.k(),
            spec.colors(),
            &spec.rule,
            spec.delta,
            spec.delete_prob,
            host_parts(spec),
            spec.seed,
        ),
        InstanceKind::FromFile => {
            let path = spec.path.as_ref().ok_or(GenError::Missing("instance path"))?;
            let text = std::fs::read_to_string(path).map_err(|e| GenError::Io(format!("{}: {e}", path.display())))?;
            Ok(parse_instance(&text)?)
        }
    }
}

fn host_parts(spec: &InstanceSpec) -> Option<usize> {
    spec.parts
        .or_else(|| (spec.pattern.is_partite() || spec.rule.kind == RuleKind::Partite).then(|| spec.pattern.k().max(2)))
}

/// The complete host a rule lives in: both arcs on every pair for directed
/// rules, all crossing k-sets for partite hosts, all k-sets otherwise.
pub fn complete_host(n: usize, k: usize, rule: &DegreeRule, parts: Option<usize>) -> Result<DirectedKGraph, GenError> {
    let directed = matches!(
        rule.kind,
        RuleKind::OutDegree | RuleKind::InDegree | RuleKind::SemiDegree
    );
    if directed {
        return Ok(DirectedKGraph::complete_digraph(n)?);
    }
    match parts {
        Some(p) => {
            let partition = Partition::contiguous(n, p)?;
            let mut g = DirectedKGraph::undirected(n, k)?.with_partition(partition.clone())?;
            for s in k_subsets(n, k) {
                let mut classes: Vec<usize> = s.iter().map(|&v| partition.class_of(v)).collect();
                classes.sort_unstable();
                classes.dedup();
                if classes.len() == k {
                    g.insert(Edge::undirected(&s))?;
                }
            }
            Ok(g)
        }
        None => Ok(DirectedKGraph::complete(n, k)?),
    }
}

/// Space-barrier systems for `K_t`: an independent class of size `n/t + 1`
/// and a complete balanced `(t-1)`-partite graph on the remaining vertices,
/// fully joined to the class. Minimum degree is `n - n/t - 1` and no `K_t`
/// factor exists. There are `(n/t) C(t,2)` colors.
pub fn gen_extremal(t: usize, n: usize, kind: InstanceKind, seed: u64) -> Result<GraphSystem, GenError> {
    if t < 2 || !n.is_multiple_of(t) || n == 0 {
        return Err(GenError::Divisibility { t, n });
    }
    let m = n / t * binomial(t, 2) as usize;
    let class = n / t + 1;
    let rest: Vec<Vertex> = (class as Vertex..n as Vertex).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let build = |order: &[Vertex]| -> Result<DirectedKGraph, GenError> {
        let mut part = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            part[v as usize] = i % (t - 1);
        }
        let mut g = DirectedKGraph::undirected(n, 2)?;
        for u in 0..n {
            for v in u + 1..n {
                let inside = v < class;
                let same = u >= class && part[u] == part[v];
                if !inside && !same {
                    g.insert(Edge::undirected(&[u as Vertex, v as Vertex]))?;
                }
            }
        }
        Ok(g)
    };
    let graphs = match kind {
        InstanceKind::ExtremalSpace => (0..m)
            .map(|_| {
                let mut order = rest.clone();
                order.shuffle(&mut rng);
                build(&order)
            })
            .collect::<Result<Vec<_>, _>>()?,
        _ => vec![build(&rest)?; m],
    };
    Ok(GraphSystem::new(graphs)?)
}

fn deficient(counts: &HashMap<Vec<Vertex>, Vec<usize>>, key: &[Vertex], family: usize, delta: usize) -> bool {
    counts.get(key).map_or(0, |c| c[family]) < delta
}

/// Adds random host edges to each color independently until its minimum
/// degree under `rule` reaches `delta`. Only edges that help a deficient
/// d-set are added.
pub fn raise_min_degree<R: Rng>(
    sys: &GraphSystem,
    rule: &DegreeRule,
    delta: usize,
    rng: &mut R,
) -> Result<GraphSystem, GenError> {
    let host = complete_host(sys.n(), sys.k(), rule, sys.partition().map(|p| p.num_classes()))?;
    let max = min_star_degree(&host, rule)?;
    if delta > max {
        return Err(GenError::Degree { target: delta, max });
    }
    let mut graphs = Vec::with_capacity(sys.m());
    for g in sys.graphs() {
        let mut g = g.clone();
        let mut counts = rule.family_counts(&g);
        let mut missing: Vec<Edge> = host.edges().filter(|e| !g.contains(e)).cloned().collect();
        missing.shuffle(rng);
        for e in missing {
            let keys = rule.keys_of_edge(&g, &e);
            if keys.iter().any(|(s, i)| deficient(&counts, s, *i, delta)) {
                let l = rule.num_families(&g);
                for (s, i) in keys {
                    counts.entry(s).or_insert_with(|| vec![0; l])[i] += 1;
                }
                g.insert(e)?;
            }
        }
        graphs.push(g);
    }
    Ok(GraphSystem::new(graphs)?)
}

/// Each color starts from the complete host and visits its edges in random
/// order, deleting each with probability `delete_prob` unless that would
/// drop some family below `delta`. `None` keeps the host maximum.
#[allow(clippy::too_many_arguments)]
pub fn gen_random_min_degree_with(
    n: usize,
    k: usize,
    m: usize,
    rule: &DegreeRule,
    delta: Option<usize>,
    delete_prob: f64,
    parts: Option<usize>,
    seed: u64,
) -> Result<GraphSystem, GenError> {
    if m == 0 {
        return Ok(GraphSystem::empty(k));
    }
    let host = complete_host(n, k, rule, parts)?;
    let max = min_star_degree(&host, rule)?;
    let delta = delta.unwrap_or(max);
    if delta > max {
        return Err(GenError::Degree { target: delta, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(m);
    for _ in 0..m {
        let mut g = host.clone();
        let mut counts = rule.family_counts(&g);
        let mut order: Vec<Edge> = host.edges().cloned().collect();
        order.shuffle(&mut rng);
        for e in order {
            if !rng.gen_bool(delete_prob.clamp(0.0, 1.0)) {
                continue;
            }
            let keys = rule.keys_of_edge(&g, &e);
            if keys.iter().all(|(s, i)| counts[s][*i] > delta) {
                for (s, i) in keys {
                    counts.get_mut(&s).expect("host key")[i] -= 1;
                }
                g.remove(&e);
            }
        }
        graphs.push(g);
    }
    Ok(GraphSystem::new(graphs)?)
}

/// Random system whose every color has `min_star_degree >= delta`.
pub fn gen_random_min_degree(
    n: usize,
    k: usize,
    m: usize,
    rule: &DegreeRule,
    delta: usize,
    seed: u64,
) -> Result<GraphSystem, GenError> {
    let parts = (rule.kind == RuleKind::Partite).then_some(2);
    gen_random_min_degree_with(n, k, m, rule, Some(delta), 1.0, parts, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min_degree(sys: &GraphSystem, rule: &DegreeRule) -> usize {
        sys.graphs()
            .iter()
            .map(|g| min_star_degree(g, rule).unwrap())
            .min()
            .unwrap()
    }

    #[test]
    fn extremal_degrees() {
        let rule = DegreeRule::standard(1);
        for t in 2..=4 {
            for n in [t, 2 * t, 3 * t] {
                for kind in [InstanceKind::IdenticalExtremal, InstanceKind::ExtremalSpace] {
                    let sys = gen_extremal(t, n, kind, 3).unwrap();
                    assert_eq!(sys.m(), n / t * t * (t - 1) / 2);
                    assert_eq!(min_degree(&sys, &rule), n - n / t - 1, "t={t} n={n}");
                }
            }
        }
        assert!(matches!(
            gen_extremal(3, 7, InstanceKind::IdenticalExtremal, 0),
            Err(GenError::Divisibility { .. })
        ));
    }

    #[test]
    fn extremal_class_is_independent() {
        let sys = gen_extremal(3, 9, InstanceKind::ExtremalSpace, 1).unwrap();
        for g in sys.graphs() {
            for u in 0..4u32 {
                for v in u + 1..4 {
                    assert!(!g.contains(&Edge::undirected(&[u, v])));
                }
            }
        }
    }

    #[test]
    fn random_min_degree_holds() {
        let rule = DegreeRule::standard(1);
        let sys = gen_random_min_degree(9, 2, 9, &rule, 7, 42).unwrap();
        assert!(min_degree(&sys, &rule) >= 7);
        let sys = gen_random_min_degree(8, 2, 3, &DegreeRule::semi_degree(), 4, 1).unwrap();
        assert!(min_degree(&sys, &DegreeRule::semi_degree()) >= 4);
        assert!(matches!(
            gen_random_min_degree(5, 2, 1, &rule, 5, 0),
            Err(GenError::Degree { target: 5, max: 4 })
        ));
    }

    #[test]
    fn extreme_targets() {
        let rule = DegreeRule::standard(1);
        let full = gen_random_min_degree(6, 2, 2, &rule, 5, 0).unwrap();
        assert_eq!(
            full,
            GraphSystem::replicate(&DirectedKGraph::complete(6, 2).unwrap(), 2).unwrap()
        );
        let empty = gen_random_min_degree_with(6, 2, 2, &rule, Some(0), 1.0, None, 0).unwrap();
        assert!(empty.graphs().iter().all(|g| g.num_edges() == 0));
    }

    #[test]
    fn reproducible() {
        let rule = DegreeRule::standard(1);
        assert_eq!(
            gen_random_min_degree(10, 2, 4, &rule, 6, 9).unwrap(),
            gen_random_min_degree(10, 2, 4, &rule, 6, 9).unwrap()
        );
    }

    #[test]
    fn raising_reaches_target() {
        let rule = DegreeRule::standard(1);
        let sys = gen_extremal(3, 12, InstanceKind::IdenticalExtremal, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raised = raise_min_degree(&sys, &rule, 8, &mut rng).unwrap();
        assert_eq!(min_degree(&raised, &rule), 8);
    }

    #[test]
    fn partite_host() {
        let g = complete_host(6, 2, &DegreeRule::partite(), Some(2)).unwrap();
        assert_eq!(g.num_edges(), 9);
        let spec = InstanceSpec::new(InstanceKind::Complete, 6, PatternF::partite_clique(2).unwrap(), 0);
        assert_eq!(generate(&spec).unwrap().m(), 3);
    }
}
