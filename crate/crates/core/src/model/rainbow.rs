//! Rainbow copies of a pattern, rainbow packings and the b-graph `H_F`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::{k_subsets, DirectedKGraph, Edge, GraphSystem, Vertex};
use super::pattern::PatternF;
use super::ModelError;

/// One rainbow copy: template vertex `i` sits on `embedding[i]` and template
/// edge `j` (in the pattern's edge order) uses color `colors[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RainbowCopy {
    pub embedding: Vec<Vertex>,
    pub colors: Vec<usize>,
}

impl RainbowCopy {
    pub fn new(embedding: Vec<Vertex>, colors: Vec<usize>) -> Self {
        RainbowCopy { embedding, colors }
    }

    /// Sorted vertex image.
    pub fn vertex_set(&self) -> Vec<Vertex> {
        let mut v = self.embedding.clone();
        v.sort_unstable();
        v
    }

    /// Sorted color set.
    pub fn color_set(&self) -> Vec<usize> {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c
    }

    /// Host `(edge, color)` pairs of this copy.
    pub fn colored_edges(&self, pattern: &PatternF) -> Vec<(Edge, usize)> {
        (0..pattern.f())
            .map(|j| (pattern.host_edge(j, &self.embedding), self.colors[j]))
            .collect()
    }

    /// Checks the copy against the host: injective embedding, distinct
    /// colors, every mapped edge present in its color.
    pub fn check(&self, sys: &GraphSystem, pattern: &PatternF) -> Result<(), String> {
        if self.embedding.len() != pattern.b() || self.colors.len() != pattern.f() {
            return Err(format!(
                "copy has {} vertices and {} colors, pattern needs {} and {}",
                self.embedding.len(),
                self.colors.len(),
                pattern.b(),
                pattern.f()
            ));
        }
        let vs = self.vertex_set();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("embedding {:?} is not injective", self.embedding));
        }
        if let Some(&v) = vs.iter().find(|&&v| v as usize >= sys.n()) {
            return Err(format!("vertex {v} out of range"));
        }
        let cs = self.color_set();
        if cs.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("color clash in {:?}", self.colors));
        }
        if let Some(&c) = cs.iter().find(|&&c| c >= sys.m()) {
            return Err(format!("color {c} out of range"));
        }
        for (e, c) in self.colored_edges(pattern) {
            if !sys.has_edge(c, &e) {
                return Err(format!("edge {:?}{} missing from color {c}", e.verts(), e.sign()));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_compatible(sys: &GraphSystem, pattern: &PatternF) -> Result<(), ModelError> {
    if sys.m() == 0 {
        return Ok(());
    }
    if sys.k() != pattern.k() {
        return Err(ModelError::PatternMismatch(format!(
            "pattern is {}-uniform, host is {}-uniform",
            pattern.k(),
            sys.k()
        )));
    }
    if sys.is_directed() != pattern.is_directed() {
        return Err(ModelError::PatternMismatch(
            "pattern and host disagree on directedness".into(),
        ));
    }
    Ok(())
}

fn check_colors(sys: &GraphSystem, colors: &[usize], expected: usize) -> Result<Vec<usize>, ModelError> {
    if colors.len() != expected {
        return Err(ModelError::ColorCount {
            expected,
            got: colors.len(),
        });
    }
    let mut sorted = colors.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ModelError::BadColors(format!("repeated color in {colors:?}")));
    }
    if let Some(&c) = sorted.iter().find(|&&c| c >= sys.m()) {
        return Err(ModelError::BadColors(format!("color {c} out of range 0..{}", sys.m())));
    }
    Ok(sorted)
}

/// Calls `visit` with each injective assignment of `palette` colors to the
/// template edges under `embedding`, color tuples in lexicographic order.
/// `palette` must be sorted. Stops early when `visit` returns false.
pub(crate) fn for_each_coloring(
    sys: &GraphSystem,
    pattern: &PatternF,
    embedding: &[Vertex],
    palette: &[usize],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let f = pattern.f();
    let mut cands: Vec<Vec<usize>> = Vec::with_capacity(f);
    for j in 0..f {
        let e = pattern.host_edge(j, embedding);
        let c: Vec<usize> = palette.iter().copied().filter(|&c| sys.has_edge(c, &e)).collect();
        if c.is_empty() {
            return true;
        }
        cands.push(c);
    }
    let mut chosen = Vec::with_capacity(f);
    assign(&cands, &mut chosen, visit)
}

fn assign(cands: &[Vec<usize>], chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    let j = chosen.len();
    if j == cands.len() {
        return visit(chosen);
    }
    for &c in &cands[j] {
        if chosen.contains(&c) {
            continue;
        }
        chosen.push(c);
        let go_on = assign(cands, chosen, visit);
        chosen.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// Rainbow copies whose vertex image is the sorted set `set`, using colors
/// drawn from the sorted `palette` (exactly `f` of them), up to `limit`.
pub fn copies_on_set(
    sys: &GraphSystem,
    pattern: &PatternF,
    set: &[Vertex],
    palette: &[usize],
    limit: usize,
) -> Vec<RainbowCopy> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    for order in pattern.placements() {
        let embedding: Vec<Vertex> = order.iter().map(|&i| set[i as usize]).collect();
        let go_on = for_each_coloring(sys, pattern, &embedding, palette, &mut |cols| {
            out.push(RainbowCopy::new(embedding.clone(), cols.to_vec()));
            out.len() < limit
        });
        if !go_on {
            break;
        }
    }
    out
}

/// First rainbow copy on the sorted set `set` with colors from `palette`.
pub fn first_copy_on_set(
    sys: &GraphSystem,
    pattern: &PatternF,
    set: &[Vertex],
    palette: &[usize],
) -> Option<RainbowCopy> {
    copies_on_set(sys, pattern, set, palette, 1).pop()
}

/// All rainbow copies using exactly the color set `colors`.
///
/// Vertex images come in lexicographic order; for each image, placements of
/// the template then color tuples in lexicographic order. Placements that
/// differ by an automorphism of the pattern describe the same copy and are
/// listed once.
pub fn enumerate_rainbow_copies(
    sys: &GraphSystem,
    pattern: &PatternF,
    colors: &[usize],
) -> Result<Vec<RainbowCopy>, ModelError> {
    let palette = check_colors(sys, colors, pattern.f())?;
    check_compatible(sys, pattern)?;
    let mut out = Vec::new();
    for set in k_subsets(sys.n(), pattern.b()) {
        out.extend(copies_on_set(sys, pattern, &set, &palette, usize::MAX));
    }
    Ok(out)
}

/// Sorted b-sets hosting a rainbow copy with exactly the colors `palette`.
pub fn hosting_sets(sys: &GraphSystem, pattern: &PatternF, palette: &[usize]) -> Vec<Vec<Vertex>> {
    let sets: Vec<Vec<Vertex>> = k_subsets(sys.n(), pattern.b()).collect();
    sets.into_par_iter()
        .filter(|s| first_copy_on_set(sys, pattern, s, palette).is_some())
        .collect()
}

/// The undirected b-graph of vertex images of rainbow copies in a slice with
/// exactly `f` colors.
pub fn build_hf(slice: &GraphSystem, pattern: &PatternF) -> Result<DirectedKGraph, ModelError> {
    if slice.m() != pattern.f() {
        return Err(ModelError::ColorCount {
            expected: pattern.f(),
            got: slice.m(),
        });
    }
    check_compatible(slice, pattern)?;
    let palette: Vec<usize> = (0..slice.m()).collect();
    let mut hf = DirectedKGraph::undirected(slice.n(), pattern.b())?;
    for s in hosting_sets(slice, pattern, &palette) {
        hf.insert(Edge::undirected(&s))?;
    }
    Ok(hf)
}

/// A collection of rainbow copies meant to be vertex- and color-disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowPacking {
    pub copies: Vec<RainbowCopy>,
}

impl RainbowPacking {
    pub fn new(copies: Vec<RainbowCopy>) -> Self {
        RainbowPacking { copies }
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    /// Sorted covered vertices.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.copies.iter().flat_map(|c| c.embedding.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Sorted used colors.
    pub fn colors(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.copies.iter().flat_map(|c| c.colors.iter().copied()).collect();
        c.sort_unstable();
        c
    }

    pub fn extend(&mut self, other: RainbowPacking) {
        self.copies.extend(other.copies);
    }

    /// Each copy valid, copies pairwise vertex- and color-disjoint.
    pub fn check_packing(&self, sys: &GraphSystem, pattern: &PatternF) -> Result<(), String> {
        for (i, c) in self.copies.iter().enumerate() {
            c.check(sys, pattern).map_err(|e| format!("copy {i}: {e}"))?;
        }
        let mut seen = BTreeSet::new();
        for v in self.vertices() {
            if !seen.insert(v) {
                return Err(format!("vertex {v} covered twice"));
            }
        }
        let mut seen = BTreeSet::new();
        for c in self.colors() {
            if !seen.insert(c) {
                return Err(format!("color {c} used twice"));
            }
        }
        Ok(())
    }

    /// A packing whose copies partition both the vertices and the colors.
    pub fn check_factor(&self, sys: &GraphSystem, pattern: &PatternF) -> Result<(), String> {
        self.check_packing(sys, pattern)?;
        let nv = self.copies.len() * pattern.b();
        if nv != sys.n() {
            return Err(format!("covers {nv} of {} vertices", sys.n()));
        }
        let nc = self.copies.len() * pattern.f();
        if nc != sys.m() {
            return Err(format!("uses {nc} of {} colors", sys.m()));
        }
        Ok(())
    }

    pub fn is_factor(&self, sys: &GraphSystem, pattern: &PatternF) -> bool {
        self.check_factor(sys, pattern).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::graph::Sign;

    fn triangles(m: usize) -> GraphSystem {
        let t = DirectedKGraph::from_edges(3, 2, [vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        GraphSystem::replicate(&t, m).unwrap()
    }

    #[test]
    fn triangle_has_six_colorings() {
        let sys = triangles(3);
        let k3 = PatternF::clique(3).unwrap();
        let copies = enumerate_rainbow_copies(&sys, &k3, &[0, 1, 2]).unwrap();
        assert_eq!(copies.len(), 6);
        assert!(copies.iter().all(|c| c.vertex_set() == vec![0, 1, 2]));
        assert_eq!(copies[0].colors, vec![0, 1, 2]);
        assert_eq!(copies[5].colors, vec![2, 1, 0]);
    }

    #[test]
    fn single_edge_copy() {
        let g = DirectedKGraph::from_edges(2, 2, [vec![0, 1]]).unwrap();
        let sys = GraphSystem::replicate(&g, 1).unwrap();
        let e = PatternF::single_edge(2).unwrap();
        assert_eq!(enumerate_rainbow_copies(&sys, &e, &[0]).unwrap().len(), 1);
    }

    #[test]
    fn empty_color_blocks_copies() {
        let mut sys = triangles(3);
        for e in [[0, 1], [0, 2], [1, 2]] {
            sys.graph_mut(1).remove(&Edge::undirected(&e));
        }
        let k3 = PatternF::clique(3).unwrap();
        assert!(enumerate_rainbow_copies(&sys, &k3, &[0, 1, 2]).unwrap().is_empty());
        assert_eq!(build_hf(&sys, &k3).unwrap().num_edges(), 0);
    }

    #[test]
    fn color_list_errors() {
        let sys = triangles(3);
        let k3 = PatternF::clique(3).unwrap();
        assert!(matches!(
            enumerate_rainbow_copies(&sys, &k3, &[0, 1]),
            Err(ModelError::ColorCount { .. })
        ));
        assert!(enumerate_rainbow_copies(&sys, &k3, &[0, 1, 1]).is_err());
        assert!(build_hf(&triangles(2), &k3).is_err());
    }

    #[test]
    fn hf_of_identical_triangles() {
        let hf = build_hf(&triangles(3), &PatternF::clique(3).unwrap()).unwrap();
        assert_eq!(hf.num_edges(), 1);
        assert!(hf.contains(&Edge::undirected(&[0, 1, 2])));
    }

    #[test]
    fn directed_copies_respect_orientation() {
        // cyclic triangle hosts the cyclic tournament but not the transitive one
        let c = DirectedKGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let sys = GraphSystem::replicate(&c, 3).unwrap();
        let tt = PatternF::transitive_tournament(3).unwrap();
        assert!(enumerate_rainbow_copies(&sys, &tt, &[0, 1, 2]).unwrap().is_empty());
        let cyc = PatternF::tournament(vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(enumerate_rainbow_copies(&sys, &cyc, &[0, 1, 2]).unwrap().len(), 6);
        let copy = &enumerate_rainbow_copies(&sys, &cyc, &[0, 1, 2]).unwrap()[0];
        assert!(copy
            .colored_edges(&cyc)
            .iter()
            .all(|(e, _)| e.sign() == Sign::Plus || e.verts() == [0, 2]));
    }

    #[test]
    fn packing_checks() {
        let sys = triangles(3);
        let k3 = PatternF::clique(3).unwrap();
        let good = RainbowPacking::new(vec![RainbowCopy::new(vec![0, 1, 2], vec![0, 1, 2])]);
        assert!(good.is_factor(&sys, &k3));
        let clash = RainbowPacking::new(vec![RainbowCopy::new(vec![0, 1, 2], vec![0, 1, 1])]);
        assert!(clash.check_factor(&sys, &k3).unwrap_err().contains("color clash"));
        assert!(RainbowPacking::default().check_packing(&sys, &k3).is_ok());
        assert!(!RainbowPacking::default().is_factor(&sys, &k3));
    }
}
