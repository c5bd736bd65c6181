//! Exact rainbow factor search and counting, for ground truth on small
//! instances.

use serde::Serialize;
use thiserror::Error;

use crate::fb::{build_fb_graph, matching_to_packing, FbEdge, FbError, FbGraph, FbMode};
use crate::model::rainbow::{check_compatible, first_copy_on_set, for_each_coloring};
use crate::model::{subsets_of, GraphSystem, ModelError, PatternF, RainbowCopy, RainbowPacking, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fb(#[from] FbError),
    #[error("need b | n and m = n f / b, got n = {n}, m = {m}, b = {b}, f = {f}")]
    Shape { n: usize, m: usize, b: usize, f: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    /// Any color may go on any copy edge.
    #[default]
    Free,
    /// Perfect matchings of the (f,b)-graph: copy `i` uses exactly color
    /// block `i`.
    Blocks,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Factor(RainbowPacking),
    Infeasible,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub outcome: OracleOutcome,
    pub nodes: u64,
}

fn check_shape(sys: &GraphSystem, pattern: &PatternF) -> Result<(), OracleError> {
    let (n, m, b, f) = (sys.n(), sys.m(), pattern.b(), pattern.f());
    if n % b != 0 || m * b != n * f {
        return Err(OracleError::Shape { n, m, b, f });
    }
    if m > 0 {
        check_compatible(sys, pattern)?;
    }
    Ok(())
}

/// Exhaustive search in [`OracleMode::Free`] with a node budget.
pub fn exact_rainbow_factor(sys: &GraphSystem, pattern: &PatternF, budget: u64) -> Result<OracleResult, OracleError> {
    exact_rainbow_factor_with(sys, pattern, budget, OracleMode::Free)
}

pub fn exact_rainbow_factor_with(
    sys: &GraphSystem,
    pattern: &PatternF,
    budget: u64,
    mode: OracleMode,
) -> Result<OracleResult, OracleError> {
    check_shape(sys, pattern)?;
    if sys.n() == 0 {
        return Ok(OracleResult {
            outcome: OracleOutcome::Factor(RainbowPacking::default()),
            nodes: 0,
        });
    }
    match mode {
        OracleMode::Free => Ok(FreeSearch::new(sys, pattern, budget).run()),
        OracleMode::Blocks => {
            let g = build_fb_graph(sys, pattern, FbMode::Strict)?;
            let mut s = BlockSearch::new(&g, budget);
            let found = s.search();
            let outcome = match found {
                Some(true) => OracleOutcome::Factor(matching_to_packing(&g, &s.chosen, sys, pattern)?),
                Some(false) => OracleOutcome::Infeasible,
                None => OracleOutcome::Timeout,
            };
            Ok(OracleResult {
                outcome,
                nodes: s.nodes,
            })
        }
    }
}

/// A placement of the pattern with the colors allowed on each of its edges.
struct Candidate {
    set: Vec<Vertex>,
    embedding: Vec<Vertex>,
    slots: Vec<Vec<usize>>,
}

/// Backtracking over vertex sets (always through the lowest uncovered
/// vertex) with incremental bipartite matching of copy edges to colors.
struct FreeSearch {
    by_min: Vec<Vec<Candidate>>,
    covered: Vec<bool>,
    /// Colors allowed on each placed copy edge.
    slots: Vec<Vec<usize>>,
    owner: Vec<Option<usize>>,
    slot_color: Vec<usize>,
    chosen: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
}

impl FreeSearch {
    fn new(sys: &GraphSystem, pattern: &PatternF, budget: u64) -> Self {
        let n = sys.n();
        let palette: Vec<usize> = (0..sys.m()).collect();
        let all: Vec<Vertex> = (0..n as Vertex).collect();
        let mut by_min: Vec<Vec<Candidate>> = (0..n).map(|_| Vec::new()).collect();
        for set in subsets_of(&all, pattern.b()) {
            for order in pattern.placements() {
                let embedding: Vec<Vertex> = order.iter().map(|&i| set[i as usize]).collect();
                let mut ok = false;
                for_each_coloring(sys, pattern, &embedding, &palette, &mut |_| {
                    ok = true;
                    false
                });
                if !ok {
                    continue;
                }
                let slots = (0..pattern.f())
                    .map(|j| {
                        let e = pattern.host_edge(j, &embedding);
                        palette.iter().copied().filter(|&c| sys.has_edge(c, &e)).collect()
                    })
                    .collect();
                by_min[set[0] as usize].push(Candidate {
                    set: set.clone(),
                    embedding,
                    slots,
                });
            }
        }
        FreeSearch {
            by_min,
            covered: vec![false; n],
            slots: Vec::new(),
            owner: vec![None; sys.m()],
            slot_color: Vec::new(),
            chosen: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn run(mut self) -> OracleResult {
        let outcome = match self.search() {
            Some(true) => {
                let mut copies = Vec::with_capacity(self.chosen.len());
                let mut slot = 0;
                for &(v, i) in &self.chosen {
                    let c = &self.by_min[v][i];
                    let colors = self.slot_color[slot..slot + c.slots.len()].to_vec();
                    slot += c.slots.len();
                    copies.push(RainbowCopy::new(c.embedding.clone(), colors));
                }
                OracleOutcome::Factor(RainbowPacking::new(copies))
            }
            Some(false) => OracleOutcome::Infeasible,
            None => OracleOutcome::Timeout,
        };
        OracleResult {
            outcome,
            nodes: self.nodes,
        }
    }

    fn augment(&mut self, slot: usize, seen: &mut [bool]) -> bool {
        for idx in 0..self.slots[slot].len() {
            let c = self.slots[slot][idx];
            if seen[c] {
                continue;
            }
            seen[c] = true;
            let free = match self.owner[c] {
                None => true,
                Some(other) => self.augment(other, seen),
            };
            if free {
                self.owner[c] = Some(slot);
                self.slot_color[slot] = c;
                return true;
            }
        }
        false
    }

    /// `Some(found)`, or `None` when the budget runs out.
    fn search(&mut self) -> Option<bool> {
        let Some(v) = self.covered.iter().position(|c| !c) else {
            return Some(true);
        };
        for i in 0..self.by_min[v].len() {
            if self.by_min[v][i].set.iter().any(|&u| self.covered[u as usize]) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let saved_owner = self.owner.clone();
            let saved_colors = self.slot_color.clone();
            let base = self.slots.len();
            let mut ok = true;
            for s in &self.by_min[v][i].slots {
                self.slots.push(s.clone());
                self.slot_color.push(usize::MAX);
            }
            for slot in base..self.slots.len() {
                let mut seen = vec![false; self.owner.len()];
                if !self.augment(slot, &mut seen) {
                    ok = false;
                    break;
                }
            }
            if ok {
                let set = self.by_min[v][i].set.clone();
                for &u in &set {
                    self.covered[u as usize] = true;
                }
                self.chosen.push((v, i));
                match self.search() {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                self.chosen.pop();
                for &u in &set {
                    self.covered[u as usize] = false;
                }
            }
            self.slots.truncate(base);
            self.owner = saved_owner;
            self.slot_color = saved_colors;
        }
        Some(false)
    }
}

/// Perfect matching search on an (f,b)-graph: the unmatched block with the
/// fewest usable edges is branched on first, edges in stored order.
struct BlockSearch<'a> {
    g: &'a FbGraph,
    covered: Vec<bool>,
    done: Vec<bool>,
    chosen: Vec<FbEdge>,
    nodes: u64,
    budget: u64,
}

impl<'a> BlockSearch<'a> {
    fn new(g: &'a FbGraph, budget: u64) -> Self {
        BlockSearch {
            g,
            covered: vec![false; g.num_b()],
            done: vec![false; g.num_blocks()],
            chosen: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn usable(&self, block: usize) -> Vec<usize> {
        self.g
            .block_edge_indices(block)
            .iter()
            .copied()
            .filter(|&i| self.g.edges()[i].verts.iter().all(|&v| !self.covered[v as usize]))
            .collect()
    }

    fn search(&mut self) -> Option<bool> {
        let mut pick: Option<(usize, Vec<usize>)> = None;
        for blk in 0..self.g.num_blocks() {
            if self.done[blk] {
                continue;
            }
            let u = self.usable(blk);
            if pick.as_ref().is_none_or(|(_, best)| u.len() < best.len()) {
                let empty = u.is_empty();
                pick = Some((blk, u));
                if empty {
                    break;
                }
            }
        }
        let Some((blk, edges)) = pick else {
            return Some(self.covered.iter().all(|&c| c));
        };
        for idx in edges {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let e = self.g.edges()[idx].clone();
            for &v in &e.verts {
                self.covered[v as usize] = true;
            }
            self.done[blk] = true;
            self.chosen.push(e.clone());
            match self.search() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.chosen.pop();
            self.done[blk] = false;
            for &v in &e.verts {
                self.covered[v as usize] = false;
            }
        }
        Some(false)
    }
}

/// Number of perfect matchings of an (f,b)-graph.
pub fn count_perfect_matchings(g: &FbGraph) -> u128 {
    fn go(g: &FbGraph, block: usize, covered: &mut [bool]) -> u128 {
        if block == g.num_blocks() {
            return u128::from(covered.iter().all(|&c| c));
        }
        let mut total = 0;
        for &i in g.block_edge_indices(block) {
            let e = &g.edges()[i];
            if e.verts.iter().any(|&v| covered[v as usize]) {
                continue;
            }
            for &v in &e.verts {
                covered[v as usize] = true;
            }
            total += go(g, block + 1, covered);
            for &v in &e.verts {
                covered[v as usize] = false;
            }
        }
        total
    }
    if !g.is_strict() {
        return 0;
    }
    go(g, 0, &mut vec![false; g.num_b()])
}

/// Counts rainbow factors in which every copy uses one block of `f`
/// consecutive colors, by direct search on the system: a vertex partition
/// into b-sets together with a bijection from parts to blocks such that
/// each part hosts a rainbow copy in its block's colors.
pub fn count_block_factors(sys: &GraphSystem, pattern: &PatternF) -> Result<u128, OracleError> {
    check_shape(sys, pattern)?;
    let (n, b, f) = (sys.n(), pattern.b(), pattern.f());
    let blocks = sys.m() / f;
    let palettes: Vec<Vec<usize>> = (0..blocks).map(|i| (i * f..(i + 1) * f).collect()).collect();

    fn go(
        sys: &GraphSystem,
        pattern: &PatternF,
        palettes: &[Vec<usize>],
        covered: &mut [bool],
        used: &mut [bool],
    ) -> u128 {
        let Some(v) = covered.iter().position(|c| !c) else {
            return 1;
        };
        let rest: Vec<Vertex> = (v as Vertex + 1..covered.len() as Vertex)
            .filter(|&u| !covered[u as usize])
            .collect();
        let mut total = 0;
        for others in subsets_of(&rest, pattern.b() - 1) {
            let mut set = vec![v as Vertex];
            set.extend(others);
            for (blk, palette) in palettes.iter().enumerate() {
                if used[blk] || first_copy_on_set(sys, pattern, &set, palette).is_none() {
                    continue;
                }
                used[blk] = true;
                for &u in &set {
                    covered[u as usize] = true;
                }
                total += go(sys, pattern, palettes, covered, used);
                for &u in &set {
                    covered[u as usize] = false;
                }
                used[blk] = false;
            }
        }
        total
    }
    debug_assert_eq!(blocks * b, n);
    Ok(go(
        sys,
        pattern,
        &palettes,
        &mut vec![false; n],
        &mut vec![false; blocks],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DirectedKGraph;

    #[test]
    fn triangle_with_three_colors() {
        let pattern = PatternF::clique(3).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(3, 2).unwrap(), 3).unwrap();
        for mode in [OracleMode::Free, OracleMode::Blocks] {
            let r = exact_rainbow_factor_with(&sys, &pattern, 1000, mode).unwrap();
            match r.outcome {
                OracleOutcome::Factor(p) => assert!(p.is_factor(&sys, &pattern)),
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(count_block_factors(&sys, &pattern).unwrap(), 1);
    }

    #[test]
    fn empty_instance() {
        let pattern = PatternF::clique(3).unwrap();
        let r = exact_rainbow_factor(&GraphSystem::empty(2), &pattern, 10).unwrap();
        assert_eq!(r.outcome, OracleOutcome::Factor(RainbowPacking::default()));
    }

    #[test]
    fn bad_shape() {
        let pattern = PatternF::clique(3).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(6, 2).unwrap(), 5).unwrap();
        assert!(matches!(
            exact_rainbow_factor(&sys, &pattern, 10),
            Err(OracleError::Shape { .. })
        ));
    }

    #[test]
    fn budget_timeout() {
        let pattern = PatternF::clique(3).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(9, 2).unwrap(), 9).unwrap();
        let r = exact_rainbow_factor(&sys, &pattern, 1).unwrap();
        assert_eq!(r.outcome, OracleOutcome::Timeout);
    }

    #[test]
    fn two_colorings_are_one_matching() {
        // K_4 in four colors, pattern single edge: 3 partitions into pairs,
        // 2 ways to give them the two blocks.
        let pattern = PatternF::single_edge(2).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(4, 2).unwrap(), 2).unwrap();
        let g = build_fb_graph(&sys, &pattern, FbMode::Strict).unwrap();
        assert_eq!(count_perfect_matchings(&g), 6);
        assert_eq!(count_block_factors(&sys, &pattern).unwrap(), 6);
    }
}
