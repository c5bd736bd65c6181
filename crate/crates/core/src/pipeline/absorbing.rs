use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::Serialize;

use super::{stream, PipelineConfig, PipelineError};
use crate::absorbers::{complete_absorber, Gadget, RainbowAbsorber};
use crate::model::rainbow::first_copy_on_set;
use crate::model::{binomial, min_star_degree, DegreeRule, GraphSystem, PatternF, RainbowCopy, RainbowPacking, Vertex};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AbsorbingStats {
    pub wanted: usize,
    pub members: usize,
    pub attempts: usize,
    /// Members dropped for meeting an earlier one.
    pub dropped: usize,
    pub spot_checks: usize,
    pub spot_hits: usize,
    pub warnings: Vec<String>,
}

/// The absorbing members: interior packings with pairwise disjoint vertex and
/// color sets. Queried with a b-set and `f` fresh colors, it names the members
/// that complete to an absorber.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorberIndex {
    gadget: Option<Gadget>,
    members: Vec<RainbowPacking>,
    pub stats: AbsorbingStats,
}

impl AbsorberIndex {
    pub fn members(&self) -> &[RainbowPacking] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn gadget(&self) -> Option<Gadget> {
        self.gadget
    }

    /// All members as one packing.
    pub fn packing(&self) -> RainbowPacking {
        RainbowPacking::new(self.members.iter().flat_map(|m| m.copies.iter().cloned()).collect())
    }

    /// Member `j` completed to an absorber for `target` with `new_colors`.
    pub fn complete(
        &self,
        sys: &GraphSystem,
        pattern: &PatternF,
        j: usize,
        target: &[Vertex],
        new_colors: &[usize],
    ) -> Option<RainbowAbsorber> {
        complete_absorber(sys, pattern, &self.members[j], target, new_colors)
    }

    /// Indices of members that absorb `target` with `new_colors`.
    pub fn lookup(&self, sys: &GraphSystem, pattern: &PatternF, target: &[Vertex], new_colors: &[usize]) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&j| self.complete(sys, pattern, j, target, new_colors).is_some())
            .collect()
    }
}

/// The degree rule used for density reports on `sys`.
pub(super) fn report_rule(sys: &GraphSystem) -> DegreeRule {
    if sys.partition().is_some() {
        DegreeRule::partite()
    } else if sys.is_directed() {
        DegreeRule::semi_degree()
    } else {
        DegreeRule::standard(1)
    }
}

/// Smallest normalized degree `δ*_d / C(n-d, k-d)` over all colors.
pub(super) fn min_density(sys: &GraphSystem) -> Option<f64> {
    let rule = report_rule(sys);
    let d = rule.d;
    let norm = binomial(sys.n().checked_sub(d)?, sys.k().checked_sub(d)?) as f64;
    if norm == 0.0 {
        return None;
    }
    let mut best = f64::INFINITY;
    for g in sys.graphs() {
        best = best.min(min_star_degree(g, &rule).ok()? as f64 / norm);
    }
    best.is_finite().then_some(best)
}

/// Random interior packing with the given colors, one `f`-chunk per copy.
fn sample_member<R: Rng>(
    sys: &GraphSystem,
    pattern: &PatternF,
    pool: &[Vertex],
    colors: &[usize],
    tries: usize,
    rng: &mut R,
) -> Option<RainbowPacking> {
    let (b, f) = (pattern.b(), pattern.f());
    let copies = colors.len() / f;
    if pool.len() < copies * b {
        return None;
    }
    'outer: for _ in 0..tries {
        let chosen: Vec<Vertex> = index::sample(rng, pool.len(), copies * b)
            .into_iter()
            .map(|i| pool[i])
            .collect();
        let mut out: Vec<RainbowCopy> = Vec::with_capacity(copies);
        for (set, chunk) in chosen.chunks(b).zip(colors.chunks(f)) {
            let mut set = set.to_vec();
            set.sort_unstable();
            let mut palette = chunk.to_vec();
            palette.sort_unstable();
            match first_copy_on_set(sys, pattern, &set, &palette) {
                Some(c) => out.push(c),
                None => continue 'outer,
            }
        }
        return Some(RainbowPacking::new(out));
    }
    None
}

/// Builds the absorbing packing with the `absorbing` stream of `cfg.seed`.
pub fn build_absorbing_packing(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
) -> Result<(RainbowPacking, AbsorberIndex), PipelineError> {
    let index = build_with_rng(sys, pattern, cfg, &mut stream(cfg.seed, "absorbing"))?;
    Ok((index.packing(), index))
}

/// Disjoint color blocks `I_i` are drawn at random, one interior packing is
/// sampled per block on random vertices, members meeting an earlier member
/// are dropped and their blocks resampled on untouched vertices. The run is
/// repeated while fewer than `ceil((1 - eps'/4) t)` members survive.
pub(super) fn build_with_rng<R: Rng>(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<AbsorberIndex, PipelineError> {
    let gadget = Gadget::for_pattern(pattern).ok_or_else(|| PipelineError::Unsupported(pattern.to_string()))?;
    let (n, m, b, f) = (sys.n(), sys.m(), pattern.b(), pattern.f());
    let member_size = gadget.internal_size(pattern);
    let block_size = gadget.interior_copies(pattern) * f;
    let by_colors = m.saturating_sub(f) / block_size.max(1);
    let wanted = cfg.absorber_count(n, member_size, b).min(by_colors);
    let mut stats = AbsorbingStats {
        wanted,
        ..AbsorbingStats::default()
    };

    let (c_abs, _) = cfg.thresholds.resolve(pattern);
    if let Some(density) = min_density(sys) {
        if density < c_abs + cfg.epsilon {
            let w = format!(
                "minimum degree density {density:.3} is below the absorbing threshold {:.3}",
                c_abs + cfg.epsilon
            );
            log::warn!("{w}");
            stats.warnings.push(w);
        }
    }
    if wanted == 0 {
        return Ok(AbsorberIndex {
            gadget: Some(gadget),
            members: Vec::new(),
            stats,
        });
    }

    let need = ((1.0 - cfg.epsilon_prime / 4.0) * wanted as f64).ceil() as usize;
    let all: Vec<Vertex> = (0..n as Vertex).collect();
    let tries = 200;
    let mut best: Vec<RainbowPacking> = Vec::new();
    for attempt in 1..=cfg.retries + 1 {
        stats.attempts = attempt;
        let mut colors: Vec<usize> = (0..m).collect();
        colors.shuffle(rng);
        let blocks: Vec<Vec<usize>> = colors.chunks(block_size).take(wanted).map(|c| c.to_vec()).collect();
        let drafts: Vec<Option<RainbowPacking>> = blocks
            .iter()
            .map(|blk| sample_member(sys, pattern, &all, blk, tries, rng))
            .collect();
        let mut used: HashSet<Vertex> = HashSet::new();
        let mut members = Vec::new();
        let mut redo = Vec::new();
        for (blk, draft) in blocks.iter().zip(drafts) {
            match draft {
                Some(p) if p.vertices().iter().all(|v| !used.contains(v)) => {
                    used.extend(p.vertices());
                    members.push(p);
                }
                _ => redo.push(blk),
            }
        }
        stats.dropped += redo.len();
        for blk in redo {
            let free: Vec<Vertex> = all.iter().copied().filter(|v| !used.contains(v)).collect();
            if let Some(p) = sample_member(sys, pattern, &free, blk, tries, rng) {
                used.extend(p.vertices());
                members.push(p);
            }
        }
        if members.len() >= need {
            best = members;
            break;
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    if best.len() < need {
        return Err(PipelineError::Selection {
            attempts: stats.attempts,
            colors: best.len(),
            min_hits: 0,
        });
    }
    stats.members = best.len();
    let mut index = AbsorberIndex {
        gadget: Some(gadget),
        members: best,
        stats,
    };
    spot_check(sys, pattern, &mut index, cfg.spot_checks, rng);
    Ok(index)
}

fn spot_check<R: Rng>(sys: &GraphSystem, pattern: &PatternF, index: &mut AbsorberIndex, checks: usize, rng: &mut R) {
    let covered: HashSet<Vertex> = index.members.iter().flat_map(|p| p.vertices()).collect();
    let taken: HashSet<usize> = index.members.iter().flat_map(|p| p.colors()).collect();
    let free_v: Vec<Vertex> = (0..sys.n() as Vertex).filter(|v| !covered.contains(v)).collect();
    let free_c: Vec<usize> = (0..sys.m()).filter(|c| !taken.contains(c)).collect();
    if free_v.len() < pattern.b() || free_c.len() < pattern.f() {
        return;
    }
    for _ in 0..checks {
        let mut target: Vec<Vertex> = free_v.choose_multiple(rng, pattern.b()).copied().collect();
        target.sort_unstable();
        let mut colors: Vec<usize> = free_c.choose_multiple(rng, pattern.f()).copied().collect();
        colors.sort_unstable();
        index.stats.spot_checks += 1;
        if (0..index.members.len()).any(|j| index.complete(sys, pattern, j, &target, &colors).is_some()) {
            index.stats.spot_hits += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DirectedKGraph;

    #[test]
    fn complete_system_members_are_disjoint() {
        let pattern = PatternF::clique(3).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(30, 2).unwrap(), 30).unwrap();
        let cfg = PipelineConfig::default();
        let (q, index) = build_absorbing_packing(&sys, &pattern, &cfg).unwrap();
        assert_eq!(index.len(), 2);
        q.check_packing(&sys, &pattern).unwrap();
        assert_eq!(q.len(), 6);
        assert_eq!(index.stats.spot_hits, index.stats.spot_checks);
    }

    #[test]
    fn zero_gamma_gives_nothing() {
        let pattern = PatternF::clique(3).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(12, 2).unwrap(), 12).unwrap();
        let cfg = PipelineConfig {
            gamma1: 0.0,
            ..PipelineConfig::default()
        };
        let (q, index) = build_absorbing_packing(&sys, &pattern, &cfg).unwrap();
        assert!(q.is_empty() && index.is_empty());
    }
}
