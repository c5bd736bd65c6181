//! Almost covers: rainbow packings that miss only a few vertices.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rounds::{round_graphs_from_system, sample_near_regular, sample_rounds, solve_round_pfms, EdgeSource};
use super::{stream, PipelineConfig, PipelineError, SampleSpace};
use crate::fb::FbGraph;
use crate::lp::{combine_block_pfms, max_fractional_matching, FractionalSolution, Hypergraph, Q};
use crate::model::rainbow::{first_copy_on_set, hosting_sets};
use crate::model::{binomial, subsets_of, GraphSystem, PatternF, RainbowCopy, RainbowPacking, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStrategy {
    /// Random rounds, fractional matchings, a near-regular sample, then
    /// greedy extraction.
    Nibble,
    Greedy,
    /// Rounds a fractional matching of sampled block edges.
    LpRounding,
}

impl fmt::Display for CoverStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverStrategy::Nibble => "nibble",
            CoverStrategy::Greedy => "greedy",
            CoverStrategy::LpRounding => "lp_rounding",
        })
    }
}

impl FromStr for CoverStrategy {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "nibble" => Ok(CoverStrategy::Nibble),
            "greedy" => Ok(CoverStrategy::Greedy),
            "lp_rounding" | "lp" => Ok(CoverStrategy::LpRounding),
            other => Err(PipelineError::Config(format!("unknown cover strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverOutcome {
    pub packing: RainbowPacking,
    /// Uncovered vertices, sorted.
    pub leftover: Vec<Vertex>,
    /// Copies taken from the randomized block phase before greedy completion.
    pub extracted: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
struct State {
    covered: Vec<bool>,
    used: Vec<bool>,
    copies: Vec<RainbowCopy>,
}

impl State {
    fn new(n: usize, m: usize) -> Self {
        State {
            covered: vec![false; n],
            used: vec![false; m],
            copies: Vec::new(),
        }
    }

    fn is_free(&self, hosts: &[Vertex], colors: &[usize]) -> bool {
        hosts.iter().all(|&v| !self.covered[v as usize]) && colors.iter().all(|&c| !self.used[c])
    }

    fn place(&mut self, copy: RainbowCopy) {
        for &v in &copy.embedding {
            self.covered[v as usize] = true;
        }
        for &c in &copy.colors {
            self.used[c] = true;
        }
        self.copies.push(copy);
    }

    fn uncovered(&self) -> Vec<Vertex> {
        (0..self.covered.len() as Vertex)
            .filter(|&v| !self.covered[v as usize])
            .collect()
    }

    fn palette(&self) -> Vec<usize> {
        (0..self.used.len()).filter(|&c| !self.used[c]).collect()
    }

    fn finish(self, extracted: usize, notes: Vec<String>) -> CoverOutcome {
        let leftover = self.uncovered();
        CoverOutcome {
            packing: RainbowPacking::new(self.copies),
            leftover,
            extracted,
            notes,
        }
    }
}

const ENUMERATE_LIMIT: u128 = 2000;
const SAMPLE_TRIES: usize = 200;

/// Random greedy: visits uncovered vertices in random order and places the
/// first rainbow copy found on a random b-set through each.
fn greedy_fill<R: Rng>(sys: &GraphSystem, pattern: &PatternF, state: &mut State, rng: &mut R) {
    let (b, f) = (pattern.b(), pattern.f());
    let mut order = state.uncovered();
    order.shuffle(rng);
    for v in order {
        if state.covered[v as usize] {
            continue;
        }
        let palette = state.palette();
        if palette.len() < f {
            return;
        }
        let others: Vec<Vertex> = state.uncovered().into_iter().filter(|&u| u != v).collect();
        if others.len() < b - 1 {
            return;
        }
        let candidates: Vec<Vec<Vertex>> = if binomial(others.len(), b - 1) <= ENUMERATE_LIMIT {
            let mut all: Vec<Vec<Vertex>> = subsets_of(&others, b - 1).collect();
            all.shuffle(rng);
            all
        } else {
            (0..SAMPLE_TRIES)
                .map(|_| {
                    index::sample(rng, others.len(), b - 1)
                        .into_iter()
                        .map(|i| others[i])
                        .collect()
                })
                .collect()
        };
        for mut set in candidates {
            set.push(v);
            set.sort_unstable();
            if let Some(copy) = first_copy_on_set(sys, pattern, &set, &palette) {
                state.place(copy);
                break;
            }
        }
    }
}

/// Runs `passes` greedy completions of `start` and keeps the best.
fn best_completion<R: Rng>(sys: &GraphSystem, pattern: &PatternF, start: &State, passes: usize, rng: &mut R) -> State {
    let mut best: Option<State> = None;
    for _ in 0..passes.max(1) {
        let mut s = start.clone();
        greedy_fill(sys, pattern, &mut s, rng);
        let left = s.uncovered().len();
        if best.as_ref().is_none_or(|b| left < b.uncovered().len()) {
            best = Some(s);
        }
        if left == 0 {
            break;
        }
    }
    best.expect("at least one pass")
}

/// Covers `sys` with the `cover` stream of `cfg.seed`; fails when more than
/// `phi n` vertices stay uncovered.
pub fn almost_cover(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    strategy: CoverStrategy,
) -> Result<RainbowPacking, PipelineError> {
    let out = cover_system(sys, pattern, cfg, strategy, &mut stream(cfg.seed, "cover"))?;
    let cap = (cfg.phi * sys.n() as f64).floor() as usize;
    if out.leftover.len() > cap {
        return Err(PipelineError::Cover {
            leftover: out.leftover.len(),
            cap,
        });
    }
    Ok(out.packing)
}

/// A rainbow packing of `sys` by the chosen strategy, with no bound on the
/// leftover. Block phases use the blocks of `f` consecutive colors; greedy
/// completion may mix colors freely.
pub fn cover_system<R: Rng>(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    strategy: CoverStrategy,
    rng: &mut R,
) -> Result<CoverOutcome, PipelineError> {
    let start = State::new(sys.n(), sys.m());
    match strategy {
        CoverStrategy::Greedy => Ok(best_completion(sys, pattern, &start, cfg.cover_passes, rng).finish(0, Vec::new())),
        CoverStrategy::LpRounding => lp_rounding(sys, pattern, cfg, rng),
        CoverStrategy::Nibble => nibble(sys, pattern, cfg, rng),
    }
}

/// Up to `cap` random b-sets hosting a copy with the colors of `block`.
fn sample_block_edges<R: Rng>(
    sys: &GraphSystem,
    pattern: &PatternF,
    block: usize,
    cap: usize,
    rng: &mut R,
) -> Vec<Vec<Vertex>> {
    let (n, b, f) = (sys.n(), pattern.b(), pattern.f());
    let palette: Vec<usize> = (block * f..(block + 1) * f).collect();
    if binomial(n, b) <= 4 * cap as u128 {
        let mut all = hosting_sets(sys, pattern, &palette);
        all.shuffle(rng);
        all.truncate(cap);
        return all;
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for _ in 0..30 * cap {
        if out.len() >= cap {
            break;
        }
        let mut set: Vec<Vertex> = index::sample(rng, n, b).into_iter().map(|v| v as Vertex).collect();
        set.sort_unstable();
        if seen.insert(set.clone()) && first_copy_on_set(sys, pattern, &set, &palette).is_some() {
            out.push(set);
        }
    }
    out
}

fn lp_rounding<R: Rng>(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<CoverOutcome, PipelineError> {
    let (n, b, f) = (sys.n(), pattern.b(), pattern.f());
    let blocks = sys.m() / f;
    let base: u64 = rng.gen();
    let per_block: Vec<(Vec<Vec<Vertex>>, FractionalSolution)> = (0..blocks)
        .into_par_iter()
        .map(|i| {
            let mut r = stream(base, &format!("lp/{i}"));
            let sets = sample_block_edges(sys, pattern, i, cfg.lp_edge_cap, &mut r);
            let h = Hypergraph::new(n, sets.clone()).expect("sampled sets are distinct b-sets");
            (sets, max_fractional_matching(&h))
        })
        .collect();

    let mut g = FbGraph::empty(blocks, n, f, b);
    for (i, (sets, _)) in per_block.iter().enumerate() {
        for s in sets {
            g.add_edge(i, s.clone())?;
        }
    }
    let mut notes = Vec::new();
    let weights: Vec<Q> = if g.is_strict() {
        let sols: Vec<FractionalSolution> = per_block.into_iter().map(|(_, s)| s).collect();
        let lifted = combine_block_pfms(&g, &sols)?;
        notes.push(format!("lifted fractional matching of value {}", lifted.value));
        lifted.weights
    } else {
        per_block.into_iter().flat_map(|(_, s)| s.weights).collect()
    };
    let weights: Vec<f64> = weights.iter().map(|q| q.to_f64().unwrap_or(0.0)).collect();

    let mut best: Option<(State, usize)> = None;
    for _ in 0..cfg.cover_passes.max(1) {
        let mut keyed: Vec<(f64, usize)> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(idx, &w)| (-rng.gen::<f64>().ln() / w, idx))
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut state = State::new(n, sys.m());
        for (_, idx) in keyed {
            let e = &g.edges()[idx];
            let palette: Vec<usize> = g.block_colors(e.block).collect();
            if state.is_free(&e.verts, &palette) {
                if let Some(copy) = first_copy_on_set(sys, pattern, &e.verts, &palette) {
                    state.place(copy);
                }
            }
        }
        let extracted = state.copies.len();
        greedy_fill(sys, pattern, &mut state, rng);
        let left = state.uncovered().len();
        if best.as_ref().is_none_or(|(s, _)| left < s.uncovered().len()) {
            best = Some((state, extracted));
        }
        if left == 0 {
            break;
        }
    }
    let (state, extracted) = best.expect("at least one pass");
    Ok(state.finish(extracted, notes))
}

fn nibble<R: Rng>(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<CoverOutcome, PipelineError> {
    let space = SampleSpace::of_system(sys, pattern);
    let rr = sample_rounds(space, EdgeSource::System(sys, pattern), cfg, rng)?;
    let mut rounds = round_graphs_from_system(sys, pattern, &rr)?;
    let mut pfms = solve_round_pfms(&rounds);
    let total = rounds.len();
    let keep: Vec<bool> = pfms.iter().map(Option::is_some).collect();
    let mut it = keep.iter();
    rounds.retain(|_| *it.next().expect("same length"));
    pfms.retain(Option::is_some);
    let mut notes = vec![format!(
        "{} of {total} rounds have a perfect fractional matching",
        rounds.len()
    )];
    let h2 = sample_near_regular(&rounds, &pfms, &rr, cfg, rng)?;
    notes.push(format!("near-regular sample has {} edges", h2.edges.len()));

    let mut edges = h2.edges;
    edges.shuffle(rng);
    let f = pattern.f();
    let mut state = State::new(sys.n(), sys.m());
    for e in edges {
        let palette: Vec<usize> = (e.block * f..(e.block + 1) * f).collect();
        if state.is_free(&e.verts, &palette) {
            if let Some(copy) = first_copy_on_set(sys, pattern, &e.verts, &palette) {
                state.place(copy);
            }
        }
    }
    let extracted = state.copies.len();
    Ok(best_completion(sys, pattern, &state, cfg.cover_passes, rng).finish(extracted, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DirectedKGraph;

    #[test]
    fn strategies_names() {
        for s in [CoverStrategy::Nibble, CoverStrategy::Greedy, CoverStrategy::LpRounding] {
            assert_eq!(s.to_string().parse::<CoverStrategy>().unwrap(), s);
        }
    }

    #[test]
    fn complete_system_is_covered() {
        let pattern = PatternF::clique(3).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(12, 2).unwrap(), 12).unwrap();
        let cfg = PipelineConfig::default();
        for s in [CoverStrategy::Nibble, CoverStrategy::Greedy, CoverStrategy::LpRounding] {
            let p = almost_cover(&sys, &pattern, &cfg, s).unwrap();
            assert!(p.is_factor(&sys, &pattern), "{s}");
        }
    }

    #[test]
    fn isolated_vertex_stays_uncovered() {
        let pattern = PatternF::clique(3).unwrap();
        let mut g = DirectedKGraph::complete(9, 2).unwrap();
        for u in 1..9 {
            g.remove(&crate::model::Edge::undirected(&[0, u]));
        }
        let sys = GraphSystem::replicate(&g, 9).unwrap();
        let cfg = PipelineConfig::default();
        let out = cover_system(&sys, &pattern, &cfg, CoverStrategy::Greedy, &mut stream(1, "c")).unwrap();
        assert!(out.leftover.contains(&0));
        assert!(almost_cover(&sys, &pattern, &cfg, CoverStrategy::Greedy).is_err());
    }
}
