use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::absorbing::{build_with_rng, AbsorberIndex};
use super::cover::cover_system;
use super::{stream, PipelineConfig, PipelineError};
use crate::absorbers::RainbowAbsorber;
use crate::model::{GraphSystem, PatternF, RainbowCopy, RainbowPacking, Vertex};
use crate::oracle::{exact_rainbow_factor, OracleError, OracleOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorStrategy {
    Absorption,
    Exact,
}

impl fmt::Display for FactorStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorStrategy::Absorption => "absorption",
            FactorStrategy::Exact => "exact",
        })
    }
}

impl FromStr for FactorStrategy {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "absorption" => Ok(FactorStrategy::Absorption),
            "exact" => Ok(FactorStrategy::Exact),
            other => Err(PipelineError::Config(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Factor,
    /// Proved by exhaustive search.
    Infeasible,
    /// The randomized search gave up.
    Failed,
    Timeout,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StageStats {
    pub restarts: usize,
    pub absorber_members: usize,
    pub absorber_vertices: usize,
    pub spot_checks: usize,
    pub spot_hits: usize,
    pub cover_copies: usize,
    pub leftover: usize,
    pub absorbed: usize,
    pub oracle_nodes: u64,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
    pub timings_ms: BTreeMap<String, u64>,
}

impl StageStats {
    fn time(&mut self, stage: &str, since: Instant) {
        *self.timings_ms.entry(stage.to_string()).or_insert(0) += since.elapsed().as_millis() as u64;
    }

    /// One-line `key=value` summary without timings.
    pub fn summary(&self) -> String {
        format!(
            "restarts={};members={};cover_copies={};leftover={};absorbed={};nodes={}",
            self.restarts, self.absorber_members, self.cover_copies, self.leftover, self.absorbed, self.oracle_nodes
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub packing: Option<RainbowPacking>,
    pub stats: StageStats,
}

/// Checks, without any of the search code, that `packing` partitions the
/// vertex set and the color set and that every copy is present in its colors.
pub fn verify_factor(sys: &GraphSystem, pattern: &PatternF, packing: &RainbowPacking) -> Result<(), String> {
    let mut seen_v = vec![false; sys.n()];
    let mut seen_c = vec![false; sys.m()];
    for (i, copy) in packing.copies.iter().enumerate() {
        if copy.embedding.len() != pattern.b() || copy.colors.len() != pattern.f() {
            return Err(format!("copy {i} has the wrong size"));
        }
        for &v in &copy.embedding {
            let slot = seen_v
                .get_mut(v as usize)
                .ok_or_else(|| format!("copy {i} uses vertex {v} outside the system"))?;
            if std::mem::replace(slot, true) {
                return Err(format!("vertex {v} covered twice"));
            }
        }
        for (j, &c) in copy.colors.iter().enumerate() {
            let slot = seen_c
                .get_mut(c)
                .ok_or_else(|| format!("copy {i} uses color {c} outside the system"))?;
            if std::mem::replace(slot, true) {
                return Err(format!("color {c} used twice"));
            }
            let e = pattern.host_edge(j, &copy.embedding);
            if !sys.graph(c).contains(&e) {
                return Err(format!("copy {i}: edge {:?} missing from color {c}", e.verts()));
            }
        }
    }
    if let Some(v) = seen_v.iter().position(|s| !s) {
        return Err(format!("vertex {v} uncovered"));
    }
    if let Some(c) = seen_c.iter().position(|s| !s) {
        return Err(format!("color {c} unused"));
    }
    Ok(())
}

/// Finds a rainbow F-factor of `sys`. Search failures come back as a
/// report with status `Failed`, `Infeasible` or `Timeout`; an `Err` means
/// bad input or a factor that failed verification.
pub fn find_rainbow_factor(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    strategy: FactorStrategy,
) -> Result<SolveReport, PipelineError> {
    let (n, m, b, f) = (sys.n(), sys.m(), pattern.b(), pattern.f());
    if n % b != 0 || m * b != n * f {
        return Err(PipelineError::Shape { n, m, b, f });
    }
    let mut stats = StageStats::default();
    let start = Instant::now();
    let found = match strategy {
        FactorStrategy::Exact => {
            let r = exact_rainbow_factor(sys, pattern, cfg.budget).map_err(|e| match e {
                OracleError::Model(e) => PipelineError::Model(e),
                OracleError::Fb(e) => PipelineError::Fb(e),
                OracleError::Shape { n, m, b, f } => PipelineError::Shape { n, m, b, f },
            })?;
            stats.oracle_nodes = r.nodes;
            match r.outcome {
                OracleOutcome::Factor(p) => Ok(p),
                OracleOutcome::Infeasible => Err(SolveStatus::Infeasible),
                OracleOutcome::Timeout => Err(SolveStatus::Timeout),
            }
        }
        FactorStrategy::Absorption => absorption(sys, pattern, cfg, &mut stats)?.ok_or(SolveStatus::Failed),
    };
    stats.time("total", start);
    match found {
        Ok(packing) => {
            verify_factor(sys, pattern, &packing).map_err(PipelineError::Verification)?;
            Ok(SolveReport {
                status: SolveStatus::Factor,
                packing: Some(packing),
                stats,
            })
        }
        Err(status) => Ok(SolveReport {
            status,
            packing: None,
            stats,
        }),
    }
}

fn absorption(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    stats: &mut StageStats,
) -> Result<Option<RainbowPacking>, PipelineError> {
    if sys.n() == 0 {
        return Ok(Some(RainbowPacking::default()));
    }
    for attempt in 0..=cfg.retries {
        stats.restarts = attempt;
        match attempt_once(sys, pattern, cfg, attempt, stats) {
            Ok(p) => return Ok(Some(p)),
            Err(e) if e.is_search_failure() => {
                log::debug!("attempt {attempt}: {e}");
                stats.failures.push(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn attempt_once(
    sys: &GraphSystem,
    pattern: &PatternF,
    cfg: &PipelineConfig,
    attempt: usize,
    stats: &mut StageStats,
) -> Result<RainbowPacking, PipelineError> {
    let (n, b, f) = (sys.n(), pattern.b(), pattern.f());

    let t = Instant::now();
    let index = build_with_rng(
        sys,
        pattern,
        cfg,
        &mut stream(cfg.seed, &format!("absorbing/{attempt}")),
    )?;
    stats.time("absorbing", t);
    stats.absorber_members = index.len();
    stats.spot_checks = index.stats.spot_checks;
    stats.spot_hits = index.stats.spot_hits;
    for w in &index.stats.warnings {
        if !stats.warnings.contains(w) {
            stats.warnings.push(w.clone());
        }
    }
    let q = index.packing();
    let q_vertices: HashSet<Vertex> = q.vertices().into_iter().collect();
    let q_colors: HashSet<usize> = q.colors().into_iter().collect();
    stats.absorber_vertices = q_vertices.len();
    let rest_v: Vec<Vertex> = (0..n as Vertex).filter(|v| !q_vertices.contains(v)).collect();
    let rest_c: Vec<usize> = (0..sys.m()).filter(|c| !q_colors.contains(c)).collect();

    let t = Instant::now();
    let sub = sys.select_colors(&rest_c).induced(&rest_v);
    let cover = cover_system(
        &sub,
        pattern,
        cfg,
        cfg.cover,
        &mut stream(cfg.seed, &format!("cover/{attempt}")),
    )?;
    stats.time("cover", t);
    let mut p1: Vec<RainbowCopy> = cover
        .packing
        .copies
        .iter()
        .map(|c| {
            RainbowCopy::new(
                c.embedding.iter().map(|&v| rest_v[v as usize]).collect(),
                c.colors.iter().map(|&x| rest_c[x]).collect(),
            )
        })
        .collect();
    let mut leftover: Vec<Vertex> = cover.leftover.iter().map(|&v| rest_v[v as usize]).collect();
    while !leftover.len().is_multiple_of(b) {
        let Some(c) = p1.pop() else { break };
        leftover.extend(c.embedding);
    }
    leftover.sort_unstable();
    stats.cover_copies = p1.len();
    stats.leftover = leftover.len();
    let cap = ((cfg.phi * n as f64).floor() as usize).max(b * index.len());
    if leftover.len() > cap {
        return Err(PipelineError::Cover {
            leftover: leftover.len(),
            cap,
        });
    }
    let used: HashSet<usize> = p1.iter().flat_map(|c| c.colors.iter().copied()).collect();
    let spare: Vec<usize> = rest_c.iter().copied().filter(|c| !used.contains(c)).collect();
    if spare.len() * b != leftover.len() * f {
        return Err(PipelineError::Verification(format!(
            "{} spare colors for {} leftover vertices",
            spare.len(),
            leftover.len()
        )));
    }

    let t = Instant::now();
    let swaps = absorb_leftover(
        sys,
        pattern,
        &index,
        &leftover,
        &spare,
        cfg.absorb_shuffles,
        &mut stream(cfg.seed, &format!("absorb/{attempt}")),
    )?;
    stats.time("absorb", t);
    stats.absorbed = swaps.len();

    let mut copies = p1;
    for (j, member) in index.members().iter().enumerate() {
        match swaps.iter().find(|(k, _)| *k == j) {
            Some((_, a)) => {
                let grown = a.exterior.vertices().len() - a.interior.vertices().len();
                let extra = a.exterior.colors().len() - a.interior.colors().len();
                if (grown, extra) != (b, f) {
                    return Err(PipelineError::Verification(format!(
                        "swap added {grown} vertices and {extra} colors"
                    )));
                }
                copies.extend(a.exterior.copies.iter().cloned());
            }
            None => copies.extend(member.copies.iter().cloned()),
        }
    }
    Ok(RainbowPacking::new(copies))
}

/// Cuts the leftover into b-sets and the spare colors into f-sets, in index
/// order first and then in random orders, and pairs them with distinct
/// members by bipartite matching.
fn absorb_leftover<R: Rng>(
    sys: &GraphSystem,
    pattern: &PatternF,
    index: &AbsorberIndex,
    leftover: &[Vertex],
    spare: &[usize],
    shuffles: usize,
    rng: &mut R,
) -> Result<Vec<(usize, RainbowAbsorber)>, PipelineError> {
    let (b, f) = (pattern.b(), pattern.f());
    let parts = leftover.len() / b;
    if parts == 0 {
        return Ok(Vec::new());
    }
    if parts > index.len() {
        return Err(PipelineError::Absorb(format!(
            "{parts} leftover sets but only {} absorbing members",
            index.len()
        )));
    }
    let mut verts = leftover.to_vec();
    let mut colors = spare.to_vec();
    for round in 0..=shuffles {
        if round > 0 {
            verts.shuffle(rng);
            colors.shuffle(rng);
        }
        let pairs: Vec<(Vec<Vertex>, Vec<usize>)> = verts
            .chunks(b)
            .zip(colors.chunks(f))
            .map(|(v, c)| {
                let (mut v, mut c) = (v.to_vec(), c.to_vec());
                v.sort_unstable();
                c.sort_unstable();
                (v, c)
            })
            .collect();
        let options: Vec<Vec<(usize, RainbowAbsorber)>> = pairs
            .iter()
            .map(|(v, c)| {
                (0..index.len())
                    .filter_map(|j| index.complete(sys, pattern, j, v, c).map(|a| (j, a)))
                    .collect()
            })
            .collect();
        let adj: Vec<Vec<usize>> = options.iter().map(|o| o.iter().map(|(j, _)| *j).collect()).collect();
        if let Some(assign) = perfect_assignment(&adj, index.len()) {
            return Ok(assign
                .into_iter()
                .zip(options)
                .map(|(j, opts)| opts.into_iter().find(|(k, _)| *k == j).expect("listed option"))
                .collect());
        }
    }
    Err(PipelineError::Absorb(format!(
        "no assignment of {parts} leftover sets to {} members",
        index.len()
    )))
}

/// Kuhn's algorithm: a right vertex for every left vertex, if possible.
fn perfect_assignment(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    fn augment(u: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &r in &adj[u] {
            if !std::mem::replace(&mut seen[r], true) && owner[r].is_none_or(|w| augment(w, adj, owner, seen)) {
                owner[r] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for u in 0..adj.len() {
        if !augment(u, adj, &mut owner, &mut vec![false; right]) {
            return None;
        }
    }
    let mut out = vec![0; adj.len()];
    for (r, o) in owner.iter().enumerate() {
        if let Some(u) = o {
            out[*u] = r;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DirectedKGraph;

    #[test]
    fn assignment() {
        assert_eq!(perfect_assignment(&[vec![0, 1], vec![0]], 2), Some(vec![1, 0]));
        assert_eq!(perfect_assignment(&[vec![0], vec![0]], 2), None);
    }

    #[test]
    fn complete_systems_have_factors() {
        let cfg = PipelineConfig::default();
        for (pattern, g) in [
            (PatternF::clique(3).unwrap(), DirectedKGraph::complete(24, 2).unwrap()),
            (
                PatternF::single_edge(2).unwrap(),
                DirectedKGraph::complete(20, 2).unwrap(),
            ),
            (
                PatternF::transitive_tournament(3).unwrap(),
                DirectedKGraph::complete_digraph(15).unwrap(),
            ),
        ] {
            let m = g.n() / pattern.b() * pattern.f();
            let sys = GraphSystem::replicate(&g, m).unwrap();
            let r = find_rainbow_factor(&sys, &pattern, &cfg, FactorStrategy::Absorption).unwrap();
            assert_eq!(r.status, SolveStatus::Factor, "{pattern}");
        }
    }

    #[test]
    fn verifier_rejects_overlap() {
        let pattern = PatternF::single_edge(2).unwrap();
        let sys = GraphSystem::replicate(&DirectedKGraph::complete(4, 2).unwrap(), 2).unwrap();
        let bad = RainbowPacking::new(vec![
            RainbowCopy::new(vec![0, 1], vec![0]),
            RainbowCopy::new(vec![1, 2], vec![1]),
        ]);
        assert!(verify_factor(&sys, &pattern, &bad).is_err());
        let good = RainbowPacking::new(vec![
            RainbowCopy::new(vec![0, 1], vec![0]),
            RainbowCopy::new(vec![2, 3], vec![1]),
        ]);
        verify_factor(&sys, &pattern, &good).unwrap();
    }
}
