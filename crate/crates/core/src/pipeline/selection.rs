use rand::seq::SliceRandom;
use rand::Rng;

use super::PipelineError;
use crate::model::{binomial, DirectedKGraph, Edge, GraphSystem};

/// A rainbow matching: at most one edge per color, pairwise disjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// `(color, edge)` pairs, by color.
    pub edges: Vec<(usize, Edge)>,
    /// Edges of the matching inside each target.
    pub hits: Vec<usize>,
    pub attempts: usize,
    pub warnings: Vec<String>,
}

impl Selection {
    pub fn colors(&self) -> Vec<usize> {
        self.edges.iter().map(|(c, _)| *c).collect()
    }
}

/// Samples one uniform edge per color, deletes one edge from every
/// intersecting pair, and retries until at least `ceil((1 - eps/4) t)` colors
/// survive and every target holds at least `ceil(eps t / 4)` chosen edges.
///
/// The density precondition `|E(Z_j) ∩ E(H_i)| >= eps C(n, k)` is only
/// checked and reported in `warnings`.
pub fn select_absorbing_matching<R: Rng>(
    h: &GraphSystem,
    targets: &[DirectedKGraph],
    eps: f64,
    retries: usize,
    rng: &mut R,
) -> Result<Selection, PipelineError> {
    let t = h.m();
    let pools: Vec<Vec<Edge>> = h.graphs().iter().map(|g| g.edges().cloned().collect()).collect();
    let mut warnings = Vec::new();
    let need_density = eps * binomial(h.n(), h.k()) as f64;
    for (j, z) in targets.iter().enumerate() {
        for (i, pool) in pools.iter().enumerate() {
            let common = pool.iter().filter(|e| z.contains(e)).count();
            if (common as f64) < need_density {
                warnings.push(format!(
                    "target {j} meets color {i} in {common} edges, below {need_density:.1}"
                ));
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let need_colors = ((1.0 - eps / 4.0) * t as f64).ceil() as usize;
    let need_hits = (eps * t as f64 / 4.0).ceil() as usize;
    let mut last = (0, 0);
    for attempt in 1..=retries + 1 {
        let mut picked: Vec<Option<&Edge>> = pools.iter().map(|p| p.choose(rng)).collect();
        for i in 0..t {
            for j in i + 1..t {
                if let (Some(a), Some(b)) = (picked[i], picked[j]) {
                    if a.verts().iter().any(|&v| b.contains(v)) {
                        picked[j] = None;
                    }
                }
            }
        }
        let edges: Vec<(usize, Edge)> = picked
            .iter()
            .enumerate()
            .filter_map(|(c, e)| e.map(|e| (c, e.clone())))
            .collect();
        let hits: Vec<usize> = targets
            .iter()
            .map(|z| edges.iter().filter(|(_, e)| z.contains(e)).count())
            .collect();
        let min_hits = hits.iter().copied().min().unwrap_or(need_hits);
        if edges.len() >= need_colors && min_hits >= need_hits {
            return Ok(Selection {
                edges,
                hits,
                attempts: attempt,
                warnings,
            });
        }
        last = (edges.len(), min_hits);
    }
    Err(PipelineError::Selection {
        attempts: retries + 1,
        colors: last.0,
        min_hits: last.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::stream;

    #[test]
    fn single_color_needs_a_hit() {
        let g = DirectedKGraph::complete(6, 2).unwrap();
        let h = GraphSystem::replicate(&g, 1).unwrap();
        let z = DirectedKGraph::from_edges(6, 2, vec![vec![0, 1]]).unwrap();
        let mut rng = stream(1, "sel");
        let s = select_absorbing_matching(&h, std::slice::from_ref(&z), 0.5, 200, &mut rng).unwrap();
        assert_eq!(s.edges, vec![(0, Edge::undirected(&[0, 1]))]);
        assert!(!s.warnings.is_empty());
        let empty = DirectedKGraph::undirected(6, 2).unwrap();
        assert!(matches!(
            select_absorbing_matching(&h, &[empty], 0.5, 3, &mut rng),
            Err(PipelineError::Selection { attempts: 4, .. })
        ));
    }

    #[test]
    fn output_is_a_rainbow_matching() {
        let g = DirectedKGraph::complete(40, 2).unwrap();
        let h = GraphSystem::replicate(&g, 4).unwrap();
        let mut rng = stream(2, "sel");
        let s = select_absorbing_matching(&h, std::slice::from_ref(&g), 0.5, 100, &mut rng).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (_, e) in &s.edges {
            for &v in e.verts() {
                assert!(seen.insert(v));
            }
        }
        assert!(s.edges.len() >= 4);
        assert_eq!(s.hits, vec![s.edges.len()]);
    }
}
