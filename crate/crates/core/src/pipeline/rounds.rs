//! Two-round randomization: many small random vertex sets of the
//! (f,b)-graph, a perfect fractional matching on each, and one random edge
//! set drawn from those weights that is close to regular.

use std::collections::{HashMap, HashSet};

use num_traits::ToPrimitive;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use super::{stream, PipelineConfig, PipelineError};
use crate::fb::{build_fb_graph, FbEdge, FbGraph, FbMode};
use crate::lp::{lift_block_pfm, FractionalSolution, LpError};
use crate::model::rainbow::first_copy_on_set;
use crate::model::{subsets_of, GraphSystem, PatternF, Vertex};

/// Shape of the vertex set being sampled: color blocks and host vertices.
/// Colors are sampled a whole block at a time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSpace {
    pub blocks: usize,
    pub hosts: usize,
    pub f: usize,
    pub b: usize,
}

impl SampleSpace {
    pub fn of_fb(g: &FbGraph) -> Self {
        SampleSpace {
            blocks: g.num_blocks(),
            hosts: g.num_b(),
            f: g.f(),
            b: g.b(),
        }
    }

    pub fn of_system(sys: &GraphSystem, pattern: &PatternF) -> Self {
        SampleSpace {
            blocks: sys.m() / pattern.f(),
            hosts: sys.n(),
            f: pattern.f(),
            b: pattern.b(),
        }
    }
}

/// Blocks and hosts of one random set, both sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundSet {
    pub blocks: Vec<usize>,
    pub hosts: Vec<Vertex>,
}

impl RoundSet {
    /// `b |R ∩ A| = f |R ∩ B|`.
    pub fn is_balanced(&self, f: usize, b: usize) -> bool {
        b * f * self.blocks.len() == f * self.hosts.len()
    }

    /// Number of (f,b)-graph vertices.
    pub fn size(&self, f: usize) -> usize {
        f * self.blocks.len() + self.hosts.len()
    }

    fn without(&self, blocks: &HashSet<usize>, hosts: &HashSet<Vertex>) -> RoundSet {
        RoundSet {
            blocks: self.blocks.iter().copied().filter(|x| !blocks.contains(x)).collect(),
            hosts: self.hosts.iter().copied().filter(|x| !hosts.contains(x)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomRound {
    pub space: SampleSpace,
    pub reserved_blocks: Vec<usize>,
    pub reserved_hosts: Vec<Vertex>,
    pub plus: Vec<RoundSet>,
    pub minus: Vec<RoundSet>,
    pub balanced: Vec<RoundSet>,
    /// Per block, the number of balanced sets containing it.
    pub block_hits: Vec<usize>,
    /// Per host, the number of balanced sets containing it.
    pub host_hits: Vec<usize>,
    /// Largest number of sampled sets sharing a pair of units.
    pub max_pair: usize,
    pub rate: f64,
    pub attempts: usize,
}

impl RandomRound {
    pub fn is_reserved_host(&self, v: Vertex) -> bool {
        self.reserved_hosts.binary_search(&v).is_ok()
    }

    pub fn is_reserved_block(&self, j: usize) -> bool {
        self.reserved_blocks.binary_search(&j).is_ok()
    }
}

/// Where edges come from: an explicit (f,b)-graph or a system and pattern.
#[derive(Clone, Copy)]
pub(super) enum EdgeSource<'a> {
    Fb(&'a FbGraph),
    System(&'a GraphSystem, &'a PatternF),
}

impl EdgeSource<'_> {
    fn has_edge(&self, block: usize, hosts: &[Vertex]) -> bool {
        match *self {
            EdgeSource::Fb(g) => g.contains(&FbEdge::new(block, hosts.to_vec())),
            EdgeSource::System(sys, pattern) => {
                let f = pattern.f();
                let palette: Vec<usize> = (block * f..(block + 1) * f).collect();
                first_copy_on_set(sys, pattern, hosts, &palette).is_some()
            }
        }
    }
}

/// Allowed deviation from a mean `mu`.
fn allowance(mu: f64, slack: f64) -> f64 {
    slack * mu.max(1.0).powf(0.75)
}

/// Samples rounds on a strict (f,b)-graph using the `rounds` stream of
/// `cfg.seed`.
pub fn two_round_sample(g: &FbGraph, cfg: &PipelineConfig) -> Result<RandomRound, PipelineError> {
    if !g.is_strict() {
        return Err(LpError::NotStrict.into());
    }
    sample_rounds(
        SampleSpace::of_fb(g),
        EdgeSource::Fb(g),
        cfg,
        &mut stream(cfg.seed, "rounds"),
    )
}

const SET_TRIES: usize = 1000;

/// Reserves `S` (about `n^reserve` hosts and as many blocks as they balance),
/// draws `n^rounds` sets `R_{i+}` at rate `n^-p_sample`, and balances each
/// `R_{i+}` by dropping reserved units only. Set sizes, hit counts, pair
/// multiplicities (at most 2) and edge multiplicities (at most 1) are checked;
/// unbalanceable sets are redrawn one by one, any other failure redraws
/// everything.
pub(super) fn sample_rounds<R: Rng>(
    space: SampleSpace,
    source: EdgeSource<'_>,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<RandomRound, PipelineError> {
    let SampleSpace { blocks, hosts, f, b } = space;
    let n = hosts.max(1) as f64;
    let rate = n.powf(-cfg.p_sample).min(1.0);
    let count = (n.powf(cfg.rounds).round() as usize).max(1);
    let reserve_hosts = ((n.powf(cfg.reserve).floor() as usize).min(hosts) / b) * b;
    let reserve_blocks = (reserve_hosts / b).min(blocks);
    let mut failure = String::new();
    for attempt in 1..=cfg.retries + 1 {
        let mut reserved_hosts: Vec<Vertex> = index::sample(rng, hosts, reserve_hosts)
            .into_iter()
            .map(|v| v as Vertex)
            .collect();
        reserved_hosts.sort_unstable();
        let mut reserved_blocks: Vec<usize> = index::sample(rng, blocks, reserve_blocks).into_vec();
        reserved_blocks.sort_unstable();
        let s_hosts: HashSet<Vertex> = reserved_hosts.iter().copied().collect();
        let s_blocks: HashSet<usize> = reserved_blocks.iter().copied().collect();

        // Given the reserve the sets are independent, so rejecting each
        // unbalanceable set on its own is the same as rejecting the family.
        let mut plus = Vec::with_capacity(count);
        let mut balanced = Vec::with_capacity(count);
        for _ in 0..count {
            let drawn = (0..SET_TRIES).find_map(|_| {
                let p = RoundSet {
                    blocks: (0..blocks).filter(|_| rng.gen_bool(rate)).collect(),
                    hosts: (0..hosts as Vertex).filter(|_| rng.gen_bool(rate)).collect(),
                };
                balance(&p, &s_blocks, &s_hosts, b).map(|r| (p, r))
            });
            let Some((p, r)) = drawn else { break };
            plus.push(p);
            balanced.push(r);
        }
        if plus.len() < count {
            failure = "a set cannot be balanced from the reserve".into();
            continue;
        }
        let minus: Vec<RoundSet> = plus.iter().map(|r| r.without(&s_blocks, &s_hosts)).collect();
        let mut rr = RandomRound {
            space,
            reserved_blocks,
            reserved_hosts,
            plus,
            minus,
            balanced,
            block_hits: vec![0; blocks],
            host_hits: vec![0; hosts],
            max_pair: 0,
            rate,
            attempts: attempt,
        };
        for r in &rr.balanced {
            for &j in &r.blocks {
                rr.block_hits[j] += 1;
            }
            for &v in &r.hosts {
                rr.host_hits[v as usize] += 1;
            }
        }
        match check_round(&mut rr, source, cfg.slack, f, b) {
            Ok(()) => return Ok(rr),
            Err(p) => failure = p,
        }
    }
    Err(PipelineError::Sampling {
        attempts: cfg.retries + 1,
        property: failure,
    })
}

/// Drops reserved units from `r` until `hosts = b * blocks`.
fn balance(r: &RoundSet, s_blocks: &HashSet<usize>, s_hosts: &HashSet<Vertex>, b: usize) -> Option<RoundSet> {
    let mut out = r.clone();
    let target_blocks = out.blocks.len().min(out.hosts.len() / b);
    let mut excess = out.blocks.len() - target_blocks;
    out.blocks.retain(|j| {
        if excess > 0 && s_blocks.contains(j) {
            excess -= 1;
            false
        } else {
            true
        }
    });
    if excess > 0 {
        return None;
    }
    let mut excess = out.hosts.len() - b * out.blocks.len();
    out.hosts.retain(|v| {
        if excess > 0 && s_hosts.contains(v) {
            excess -= 1;
            false
        } else {
            true
        }
    });
    (excess == 0).then_some(out)
}

fn check_round(rr: &mut RandomRound, source: EdgeSource<'_>, slack: f64, f: usize, b: usize) -> Result<(), String> {
    let space = rr.space;
    let expected_size = rr.rate * (f * space.blocks + space.hosts) as f64;
    for (i, r) in rr.balanced.iter().enumerate() {
        if !r.is_balanced(f, b) {
            return Err(format!("set {i} is not balanced"));
        }
        let dev = (r.size(f) as f64 - expected_size).abs();
        if dev > allowance(expected_size, slack) {
            return Err(format!(
                "set {i} has size {}, expected about {expected_size:.1}",
                r.size(f)
            ));
        }
    }
    let rho = rr.rate * rr.plus.len() as f64;
    let tol = allowance(rho, slack);
    let units = rr
        .block_hits
        .iter()
        .enumerate()
        .map(|(j, &y)| (y, rr.is_reserved_block(j)))
        .chain(
            rr.host_hits
                .iter()
                .enumerate()
                .map(|(v, &y)| (y, rr.is_reserved_host(v as Vertex))),
        );
    for (y, reserved) in units {
        let y = y as f64;
        if y > rho + tol || (!reserved && y < rho - tol) {
            return Err(format!("a vertex lies in {y} sets, expected about {rho:.1}"));
        }
    }

    // unit ids: blocks first, then hosts
    let nb = space.blocks;
    let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
    for r in &rr.plus {
        let ids: Vec<usize> = r
            .blocks
            .iter()
            .copied()
            .chain(r.hosts.iter().map(|&v| nb + v as usize))
            .collect();
        for (x, &p) in ids.iter().enumerate() {
            for &q in &ids[x + 1..] {
                let c = pairs.entry((p, q)).or_insert(0);
                *c += 1;
                rr.max_pair = rr.max_pair.max(*c);
            }
        }
    }
    if rr.max_pair > 2 {
        return Err(format!("a pair lies in {} sets", rr.max_pair));
    }
    for (i, ri) in rr.plus.iter().enumerate() {
        for rj in &rr.plus[i + 1..] {
            let common_blocks: Vec<usize> = ri
                .blocks
                .iter()
                .copied()
                .filter(|x| rj.blocks.binary_search(x).is_ok())
                .collect();
            let common_hosts: Vec<Vertex> = ri
                .hosts
                .iter()
                .copied()
                .filter(|x| rj.hosts.binary_search(x).is_ok())
                .collect();
            if common_blocks.is_empty() || common_hosts.len() < b {
                continue;
            }
            for blk in &common_blocks {
                if subsets_of(&common_hosts, b).any(|s| source.has_edge(*blk, &s)) {
                    return Err("an edge lies in two sets".into());
                }
            }
        }
    }
    Ok(())
}

/// The subgraph induced by one balanced set, relabelled: local block `j` is
/// `set.blocks[j]`, local host `h` is `set.hosts[h]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundGraph {
    pub set: RoundSet,
    pub graph: FbGraph,
}

impl RoundGraph {
    pub fn global_edge(&self, e: &FbEdge) -> FbEdge {
        FbEdge::new(
            self.set.blocks[e.block],
            e.verts.iter().map(|&h| self.set.hosts[h as usize]).collect(),
        )
    }
}

/// Induced subgraphs `g[R_i]` of the balanced sets.
pub fn round_graphs(g: &FbGraph, rr: &RandomRound) -> Vec<RoundGraph> {
    rr.balanced.iter().map(|set| induce_fb(g, set)).collect()
}

fn induce_fb(g: &FbGraph, set: &RoundSet) -> RoundGraph {
    let local: HashMap<Vertex, Vertex> = set.hosts.iter().enumerate().map(|(i, &v)| (v, i as Vertex)).collect();
    let mut graph = FbGraph::empty(set.blocks.len(), set.hosts.len(), g.f(), g.b());
    for (j, &blk) in set.blocks.iter().enumerate() {
        for &idx in g.block_edge_indices(blk) {
            let e = &g.edges()[idx];
            let mapped: Option<Vec<Vertex>> = e.verts.iter().map(|v| local.get(v).copied()).collect();
            if let Some(verts) = mapped {
                graph.add_edge(j, verts).expect("mapped edge is valid");
            }
        }
    }
    RoundGraph {
        set: set.clone(),
        graph,
    }
}

pub(super) fn round_graphs_from_system(
    sys: &GraphSystem,
    pattern: &PatternF,
    rr: &RandomRound,
) -> Result<Vec<RoundGraph>, PipelineError> {
    let f = pattern.f();
    rr.balanced
        .par_iter()
        .map(|set| {
            let colors: Vec<usize> = set.blocks.iter().flat_map(|&j| j * f..(j + 1) * f).collect();
            let sub = sys.select_colors(&colors).induced(&set.hosts);
            let graph = build_fb_graph(&sub, pattern, FbMode::Strict)?;
            Ok(RoundGraph {
                set: set.clone(),
                graph,
            })
        })
        .collect()
}

/// Perfect fractional matchings of the round graphs, solved in parallel.
pub fn solve_round_pfms(rounds: &[RoundGraph]) -> Vec<Option<FractionalSolution>> {
    rounds
        .par_iter()
        .map(|r| match lift_block_pfm(&r.graph) {
            Ok((true, sol)) => Some(sol),
            _ => None,
        })
        .collect()
}

/// The random spanning subgraph `H''`, with degree statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct NearRegular {
    /// Chosen edges in global labels.
    pub edges: Vec<FbEdge>,
    pub block_degree: Vec<usize>,
    pub host_degree: Vec<usize>,
    /// Largest `|d(v) - E d(v)|` divided by its allowance (upper side only
    /// for reserved vertices).
    pub max_deviation: f64,
    pub max_pair: usize,
    pub attempts: usize,
}

/// Keeps every edge of every round graph independently with its weight in
/// that round's perfect fractional matching. Degrees must stay within the
/// configured slack of their expectation (only from above on reserved
/// vertices) and no pair may lie in more than `slack * max(2, n^(1-p_sample))`
/// edges; otherwise the draw is repeated.
pub fn sample_near_regular<R: Rng>(
    rounds: &[RoundGraph],
    pfms: &[Option<FractionalSolution>],
    rr: &RandomRound,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<NearRegular, PipelineError> {
    let space = rr.space;
    let mut weighted: Vec<(FbEdge, f64)> = Vec::new();
    for (i, (r, sol)) in rounds.iter().zip(pfms).enumerate() {
        let sol = sol.as_ref().ok_or(PipelineError::MissingPfm(i))?;
        for (e, w) in r.graph.edges().iter().zip(&sol.weights) {
            let w = w.to_f64().unwrap_or(0.0);
            if w > 0.0 {
                weighted.push((r.global_edge(e), w));
            }
        }
    }
    let mut mu_block = vec![0.0; space.blocks];
    let mut mu_host = vec![0.0; space.hosts];
    for (e, w) in &weighted {
        mu_block[e.block] += w;
        for &v in &e.verts {
            mu_host[v as usize] += w;
        }
    }
    let n = space.hosts.max(1) as f64;
    let pair_cap = (cfg.slack * n.powf(1.0 - cfg.p_sample).max(2.0)).floor() as usize;
    let mut reason = String::new();
    for attempt in 1..=cfg.retries + 1 {
        let edges: Vec<FbEdge> = weighted
            .iter()
            .filter(|(_, w)| rng.gen_bool(w.min(1.0)))
            .map(|(e, _)| e.clone())
            .collect();
        let mut block_degree = vec![0usize; space.blocks];
        let mut host_degree = vec![0usize; space.hosts];
        let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
        let mut max_pair = 0;
        for e in &edges {
            block_degree[e.block] += 1;
            let ids: Vec<usize> = std::iter::once(e.block)
                .chain(e.verts.iter().map(|&v| space.blocks + v as usize))
                .collect();
            for &v in &e.verts {
                host_degree[v as usize] += 1;
            }
            for (x, &p) in ids.iter().enumerate() {
                for &q in &ids[x + 1..] {
                    let c = pairs.entry((p, q)).or_insert(0);
                    *c += 1;
                    max_pair = max_pair.max(*c);
                }
            }
        }
        let mut max_deviation: f64 = 0.0;
        let units = (0..space.blocks)
            .map(|j| (block_degree[j], mu_block[j], rr.is_reserved_block(j)))
            .chain((0..space.hosts).map(|v| (host_degree[v], mu_host[v], rr.is_reserved_host(v as Vertex))));
        for (d, mu, reserved) in units {
            let diff = d as f64 - mu;
            let diff = if reserved { diff.max(0.0) } else { diff.abs() };
            max_deviation = max_deviation.max(diff / allowance(mu, cfg.slack));
        }
        let out = NearRegular {
            edges,
            block_degree,
            host_degree,
            max_deviation,
            max_pair,
            attempts: attempt,
        };
        if max_deviation <= 1.0 && max_pair <= pair_cap {
            return Ok(out);
        }
        reason = format!("degree deviation ratio {max_deviation:.2}, pair degree {max_pair} (cap {pair_cap})");
    }
    Err(PipelineError::NearRegular {
        attempts: cfg.retries + 1,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DirectedKGraph;

    fn complete_matching_graph(n: usize) -> FbGraph {
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(n, 2).unwrap(), n / 2).unwrap();
        build_fb_graph(&sys, &PatternF::single_edge(2).unwrap(), FbMode::Strict).unwrap()
    }

    #[test]
    fn rounds_are_balanced() {
        let g = complete_matching_graph(40);
        let cfg = PipelineConfig::default();
        let rr = two_round_sample(&g, &cfg).unwrap();
        assert_eq!(rr.plus.len(), (40f64.powf(1.1)).round() as usize);
        for ((p, m), r) in rr.plus.iter().zip(&rr.minus).zip(&rr.balanced) {
            assert!(r.is_balanced(1, 2));
            assert!(m.blocks.iter().all(|x| r.blocks.contains(x)));
            assert!(m.hosts.iter().all(|x| r.hosts.contains(x)));
            assert!(r.blocks.iter().all(|x| p.blocks.contains(x)));
            assert!(r.hosts.iter().all(|x| p.hosts.contains(x)));
        }
    }

    #[test]
    fn single_round() {
        let g = complete_matching_graph(20);
        let cfg = PipelineConfig {
            rounds: 0.0,
            ..PipelineConfig::default()
        };
        let rr = two_round_sample(&g, &cfg).unwrap();
        assert_eq!(rr.balanced.len(), 1);
        assert!(rr.balanced[0].is_balanced(1, 2));
    }

    #[test]
    fn integral_weights_reproduce_matchings() {
        let g = complete_matching_graph(10);
        let set = RoundSet {
            blocks: vec![0, 3],
            hosts: vec![1, 4, 6, 9],
        };
        let r = induce_fb(&g, &set);
        assert_eq!(r.graph.num_edges(), 2 * 6);
        // weight 1 on two disjoint edges
        let mut weights = vec![crate::lp::Q::from_integer(0.into()); r.graph.num_edges()];
        let want = [FbEdge::new(0, vec![0, 1]), FbEdge::new(1, vec![2, 3])];
        for e in &want {
            weights[r.graph.edge_index(e).unwrap()] = crate::lp::Q::from_integer(1.into());
        }
        let sol = FractionalSolution {
            kind: crate::lp::SolutionKind::Matching,
            value: crate::lp::Q::from_integer(2.into()),
            weights,
        };
        let rr = RandomRound {
            space: SampleSpace::of_fb(&g),
            reserved_blocks: vec![],
            reserved_hosts: vec![],
            plus: vec![set.clone()],
            minus: vec![set.clone()],
            balanced: vec![set],
            block_hits: vec![0; 5],
            host_hits: vec![0; 10],
            max_pair: 1,
            rate: 0.5,
            attempts: 1,
        };
        let cfg = PipelineConfig::default();
        let h = sample_near_regular(std::slice::from_ref(&r), &[Some(sol)], &rr, &cfg, &mut stream(0, "t")).unwrap();
        let got: HashSet<FbEdge> = h.edges.into_iter().collect();
        let expect: HashSet<FbEdge> = want.iter().map(|e| r.global_edge(e)).collect();
        assert_eq!(got, expect);
        assert_eq!(
            sample_near_regular(&[r], &[None], &rr, &cfg, &mut stream(0, "t")),
            Err(PipelineError::MissingPfm(0))
        );
    }

    #[test]
    fn empty_rounds_give_empty_sample() {
        let g = complete_matching_graph(10);
        let rr = RandomRound {
            space: SampleSpace::of_fb(&g),
            reserved_blocks: vec![],
            reserved_hosts: vec![],
            plus: vec![],
            minus: vec![],
            balanced: vec![],
            block_hits: vec![0; 5],
            host_hits: vec![0; 10],
            max_pair: 0,
            rate: 0.5,
            attempts: 1,
        };
        let h = sample_near_regular(&[], &[], &rr, &PipelineConfig::default(), &mut stream(0, "t")).unwrap();
        assert!(h.edges.is_empty());
    }
}
