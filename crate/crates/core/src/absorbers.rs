//! Rainbow absorbers.
//!
//! An absorber for a b-set `B` is a vertex set `L` disjoint from `B` with two
//! rainbow packings: the interior covers `L`, the exterior covers `B ∪ L` and
//! uses the interior colors plus `f` new ones. Swapping interior for exterior
//! swallows `B` and `f` colors.
//!
//! Two gadgets are built here. The clique gadget (complete patterns on `t`
//! vertices) uses a bridge copy on `v_1, …, v_t` and, for each `i`, a
//! `(t-1)`-set `S_i` such that `S_i ∪ {v_i}` and `S_i ∪ {u_i}` both host copies
//! with the colors of block `i`, agreeing on the edges inside `S_i`. The
//! matching gadget (single k-edges) uses an edge `{u_2, …, u_k, v_1}` in color
//! `c_1` and, for `i >= 2`, a `(k-1)`-set `U_i` with `U_i ∪ {u_i}` and
//! `U_i ∪ {v_i}` both edges of color `c_i`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::model::rainbow::{check_compatible, copies_on_set, first_copy_on_set};
use crate::model::{
    subsets_of, Edge, GraphSystem, ModelError, PatternF, PatternKind, RainbowCopy, RainbowPacking, Vertex,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbsorberError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("no absorber gadget for pattern {0}")]
    Unsupported(String),
    #[error("invalid absorber: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RainbowAbsorber {
    /// The b-set to absorb.
    pub target: Vec<Vertex>,
    /// The absorber's own vertices, sorted.
    pub internal: Vec<Vertex>,
    pub interior: RainbowPacking,
    pub exterior: RainbowPacking,
}

impl RainbowAbsorber {
    /// Colors in the exterior but not the interior.
    pub fn new_colors(&self) -> Vec<usize> {
        let int: BTreeSet<usize> = self.interior.colors().into_iter().collect();
        self.exterior
            .colors()
            .into_iter()
            .filter(|c| !int.contains(c))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsorbMode {
    Interior,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gadget {
    Clique,
    Matching,
}

impl Gadget {
    pub fn for_pattern(pattern: &PatternF) -> Option<Gadget> {
        match pattern.kind() {
            PatternKind::SingleEdge(_) => Some(Gadget::Matching),
            _ if pattern.is_complete_pattern() => Some(Gadget::Clique),
            _ => None,
        }
    }

    /// Number of copies in an interior packing.
    pub fn interior_copies(self, pattern: &PatternF) -> usize {
        match self {
            Gadget::Clique => pattern.b(),
            Gadget::Matching => pattern.k() - 1,
        }
    }

    /// `|L|`, the absorber size minus `b`.
    pub fn internal_size(self, pattern: &PatternF) -> usize {
        self.interior_copies(pattern) * pattern.b()
    }
}

/// Checks every structural requirement of an absorber against `sys`.
pub fn validate_absorber(a: &RainbowAbsorber, sys: &GraphSystem, pattern: &PatternF) -> Result<(), String> {
    let b_set: BTreeSet<Vertex> = a.target.iter().copied().collect();
    let l_set: BTreeSet<Vertex> = a.internal.iter().copied().collect();
    if b_set.len() != pattern.b() || a.target.len() != pattern.b() {
        return Err(format!("target must be a {}-set", pattern.b()));
    }
    if l_set.len() != a.internal.len() {
        return Err("internal set repeats a vertex".into());
    }
    if !b_set.is_disjoint(&l_set) {
        return Err("B∩L nonempty".into());
    }
    for (name, p) in [("interior", &a.interior), ("exterior", &a.exterior)] {
        let colors = p.colors();
        if colors.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("color clash in {name}"));
        }
        p.check_packing(sys, pattern).map_err(|e| format!("{name}: {e}"))?;
    }
    let int_v: BTreeSet<Vertex> = a.interior.vertices().into_iter().collect();
    if int_v != l_set {
        return Err("interior does not cover exactly L".into());
    }
    let ext_v: BTreeSet<Vertex> = a.exterior.vertices().into_iter().collect();
    let bl: BTreeSet<Vertex> = b_set.union(&l_set).copied().collect();
    if ext_v != bl {
        return Err("exterior does not cover exactly B ∪ L".into());
    }
    let int_c: BTreeSet<usize> = a.interior.colors().into_iter().collect();
    let ext_c: BTreeSet<usize> = a.exterior.colors().into_iter().collect();
    if !int_c.is_subset(&ext_c) {
        return Err("interior colors missing from exterior".into());
    }
    if ext_c.len() != int_c.len() + pattern.f() || ext_c.len() * pattern.b() != bl.len() * pattern.f() {
        return Err("exterior must use exactly f more colors than the interior".into());
    }
    Ok(())
}

/// The interior or exterior packing of a valid absorber.
pub fn absorb(
    a: &RainbowAbsorber,
    sys: &GraphSystem,
    pattern: &PatternF,
    mode: AbsorbMode,
) -> Result<RainbowPacking, AbsorberError> {
    validate_absorber(a, sys, pattern).map_err(AbsorberError::Invalid)?;
    Ok(match mode {
        AbsorbMode::Interior => a.interior.clone(),
        AbsorbMode::Exterior => a.exterior.clone(),
    })
}

fn check_vertices(sys: &GraphSystem, set: &[Vertex], size: usize, what: &str) -> Result<(), AbsorberError> {
    let distinct: BTreeSet<Vertex> = set.iter().copied().collect();
    if set.len() != size || distinct.len() != size || set.iter().any(|&v| v as usize >= sys.n()) {
        return Err(AbsorberError::Malformed(format!(
            "{what} must be {size} distinct vertices of 0..{}",
            sys.n()
        )));
    }
    Ok(())
}

fn check_color_tuple(sys: &GraphSystem, colors: &[usize], size: usize) -> Result<(), AbsorberError> {
    let distinct: BTreeSet<usize> = colors.iter().copied().collect();
    if colors.len() != size || distinct.len() != size || colors.iter().any(|&c| c >= sys.m()) {
        return Err(AbsorberError::Malformed(format!(
            "need {size} distinct colors of 0..{}, got {colors:?}",
            sys.m()
        )));
    }
    Ok(())
}

fn sorted_with(s: &[Vertex], extra: Vertex) -> Vec<Vertex> {
    let mut v = s.to_vec();
    v.push(extra);
    v.sort_unstable();
    v
}

/// Colored edges of `copy` lying inside `inner`, sorted.
fn inner_edges(copy: &RainbowCopy, pattern: &PatternF, inner: &[Vertex]) -> Vec<(Edge, usize)> {
    let mut out: Vec<(Edge, usize)> = copy
        .colored_edges(pattern)
        .into_iter()
        .filter(|(e, _)| e.verts().iter().all(|v| inner.contains(v)))
        .collect();
    out.sort();
    out
}

/// A pair of copies on `s ∪ {v}` and `s ∪ {u}` with colors `palette` that
/// agree on the edges inside `s`.
fn swap_pair(
    sys: &GraphSystem,
    pattern: &PatternF,
    s: &[Vertex],
    v: Vertex,
    u: Vertex,
    palette: &[usize],
) -> Option<(RainbowCopy, RainbowCopy)> {
    let vs = copies_on_set(sys, pattern, &sorted_with(s, v), palette, usize::MAX);
    if vs.is_empty() {
        return None;
    }
    let us = copies_on_set(sys, pattern, &sorted_with(s, u), palette, usize::MAX);
    let u_inner: Vec<Vec<(Edge, usize)>> = us.iter().map(|c| inner_edges(c, pattern, s)).collect();
    for cv in &vs {
        let iv = inner_edges(cv, pattern, s);
        if let Some(pos) = u_inner.iter().position(|iu| *iu == iv) {
            return Some((cv.clone(), us[pos].clone()));
        }
    }
    None
}

/// Exterior copy on `s ∪ {u}` matching a fixed interior copy on `s ∪ {v}`.
fn matching_exterior(
    sys: &GraphSystem,
    pattern: &PatternF,
    interior: &RainbowCopy,
    v: Vertex,
    u: Vertex,
) -> Option<RainbowCopy> {
    let s: Vec<Vertex> = interior.vertex_set().into_iter().filter(|&x| x != v).collect();
    let want = inner_edges(interior, pattern, &s);
    copies_on_set(sys, pattern, &sorted_with(&s, u), &interior.color_set(), usize::MAX)
        .into_iter()
        .find(|c| inner_edges(c, pattern, &s) == want)
}

fn any_color_pair(sys: &GraphSystem, a: Vertex, b: Vertex, palette: &[usize]) -> bool {
    let e = Edge::undirected(&[a, b]);
    palette.iter().any(|&c| sys.graph(c).contains_any_sign(&e))
}

/// Clique-gadget absorbers for the ordered target `u_1, …, u_t` with color
/// tuple `colors`: blocks `1..=t` of size `f` serve the copies through `v_i`,
/// the last block the bridge. Each vertex structure (ordered bridge tuple
/// and sets `S_i`) is reported once, with its first coloring.
pub fn enumerate_clique_absorbers(
    sys: &GraphSystem,
    pattern: &PatternF,
    target: &[Vertex],
    colors: &[usize],
    limit: usize,
) -> Result<Vec<RainbowAbsorber>, AbsorberError> {
    if Gadget::for_pattern(pattern) != Some(Gadget::Clique) {
        return Err(AbsorberError::Unsupported(pattern.to_string()));
    }
    check_compatible(sys, pattern)?;
    let (t, f) = (pattern.b(), pattern.f());
    check_vertices(sys, target, t, "target")?;
    check_color_tuple(sys, colors, (t + 1) * f)?;
    let palettes: Vec<Vec<usize>> = colors
        .chunks(f)
        .map(|c| {
            let mut p = c.to_vec();
            p.sort_unstable();
            p
        })
        .collect();
    let mut search = CliqueSearch {
        sys,
        pattern,
        target,
        palettes: &palettes,
        used: vec![false; sys.n()],
        v: Vec::with_capacity(t),
        interior: Vec::with_capacity(t),
        exterior: Vec::with_capacity(t + 1),
        out: Vec::new(),
        limit,
    };
    for &u in target {
        search.used[u as usize] = true;
    }
    if limit > 0 {
        search.choose_bridge();
    }
    Ok(search.out)
}

struct CliqueSearch<'a> {
    sys: &'a GraphSystem,
    pattern: &'a PatternF,
    target: &'a [Vertex],
    palettes: &'a [Vec<usize>],
    used: Vec<bool>,
    v: Vec<Vertex>,
    interior: Vec<RainbowCopy>,
    exterior: Vec<RainbowCopy>,
    out: Vec<RainbowAbsorber>,
    limit: usize,
}

impl CliqueSearch<'_> {
    fn done(&self) -> bool {
        self.out.len() >= self.limit
    }

    fn choose_bridge(&mut self) {
        let t = self.pattern.b();
        if self.v.len() == t {
            let mut set = self.v.clone();
            set.sort_unstable();
            if let Some(bridge) = first_copy_on_set(self.sys, self.pattern, &set, &self.palettes[t]) {
                self.exterior.push(bridge);
                self.choose_sets(0);
                self.exterior.pop();
            }
            return;
        }
        let bridge_palette = &self.palettes[t];
        for x in 0..self.sys.n() as Vertex {
            if self.done() {
                return;
            }
            if self.used[x as usize] || !self.v.iter().all(|&y| any_color_pair(self.sys, x, y, bridge_palette)) {
                continue;
            }
            self.used[x as usize] = true;
            self.v.push(x);
            self.choose_bridge();
            self.v.pop();
            self.used[x as usize] = false;
        }
    }

    fn choose_sets(&mut self, i: usize) {
        let t = self.pattern.b();
        if i == t {
            let mut internal: Vec<Vertex> = self.interior.iter().flat_map(|c| c.embedding.clone()).collect();
            internal.sort_unstable();
            self.out.push(RainbowAbsorber {
                target: self.target.to_vec(),
                internal,
                interior: RainbowPacking::new(self.interior.clone()),
                exterior: RainbowPacking::new(self.exterior.clone()),
            });
            return;
        }
        let free: Vec<Vertex> = (0..self.sys.n() as Vertex)
            .filter(|&x| !self.used[x as usize])
            .collect();
        let (v, u) = (self.v[i], self.target[i]);
        for s in subsets_of(&free, t - 1) {
            if self.done() {
                return;
            }
            let Some((cv, cu)) = swap_pair(self.sys, self.pattern, &s, v, u, &self.palettes[i]) else {
                continue;
            };
            for &x in &s {
                self.used[x as usize] = true;
            }
            self.interior.push(cv);
            self.exterior.push(cu);
            self.choose_sets(i + 1);
            self.exterior.pop();
            self.interior.pop();
            for &x in &s {
                self.used[x as usize] = false;
            }
        }
    }
}

/// Matching-gadget absorbers for single k-edges, target `v_1, …, v_k` in the
/// given order and colors `c_1, …, c_k`. Each vertex structure (ordered
/// `u_2, …, u_k` and sets `U_i`) is reported once.
pub fn enumerate_matching_absorbers(
    sys: &GraphSystem,
    pattern: &PatternF,
    target: &[Vertex],
    colors: &[usize],
    limit: usize,
) -> Result<Vec<RainbowAbsorber>, AbsorberError> {
    if Gadget::for_pattern(pattern) != Some(Gadget::Matching) || pattern.is_directed() {
        return Err(AbsorberError::Unsupported(pattern.to_string()));
    }
    check_compatible(sys, pattern)?;
    let k = pattern.k();
    check_vertices(sys, target, k, "target")?;
    check_color_tuple(sys, colors, k)?;
    let mut search = MatchingSearch {
        sys,
        target,
        colors,
        used: vec![false; sys.n()],
        u: Vec::with_capacity(k - 1),
        interior: Vec::new(),
        exterior: Vec::new(),
        out: Vec::new(),
        limit,
    };
    for &v in target {
        search.used[v as usize] = true;
    }
    if limit > 0 {
        search.choose_u();
    }
    Ok(search.out)
}

struct MatchingSearch<'a> {
    sys: &'a GraphSystem,
    target: &'a [Vertex],
    colors: &'a [usize],
    used: Vec<bool>,
    u: Vec<Vertex>,
    interior: Vec<RainbowCopy>,
    exterior: Vec<RainbowCopy>,
    out: Vec<RainbowAbsorber>,
    limit: usize,
}

fn edge_copy(sys: &GraphSystem, verts: &[Vertex], color: usize) -> Option<RainbowCopy> {
    let mut v = verts.to_vec();
    v.sort_unstable();
    sys.has_edge(color, &Edge::undirected(&v))
        .then(|| RainbowCopy::new(v, vec![color]))
}

impl MatchingSearch<'_> {
    fn done(&self) -> bool {
        self.out.len() >= self.limit
    }

    fn choose_u(&mut self) {
        let k = self.target.len();
        if self.u.len() == k - 1 {
            let mut verts = self.u.clone();
            verts.push(self.target[0]);
            if let Some(first) = edge_copy(self.sys, &verts, self.colors[0]) {
                self.exterior.push(first);
                self.choose_sets(1);
                self.exterior.pop();
            }
            return;
        }
        for x in 0..self.sys.n() as Vertex {
            if self.done() {
                return;
            }
            if self.used[x as usize] {
                continue;
            }
            self.used[x as usize] = true;
            self.u.push(x);
            self.choose_u();
            self.u.pop();
            self.used[x as usize] = false;
        }
    }

    fn choose_sets(&mut self, i: usize) {
        let k = self.target.len();
        if i == k {
            let mut internal: Vec<Vertex> = self.interior.iter().flat_map(|c| c.embedding.clone()).collect();
            internal.sort_unstable();
            self.out.push(RainbowAbsorber {
                target: self.target.to_vec(),
                internal,
                interior: RainbowPacking::new(self.interior.clone()),
                exterior: RainbowPacking::new(self.exterior.clone()),
            });
            return;
        }
        let free: Vec<Vertex> = (0..self.sys.n() as Vertex)
            .filter(|&x| !self.used[x as usize])
            .collect();
        let (u, v, c) = (self.u[i - 1], self.target[i], self.colors[i]);
        for s in subsets_of(&free, k - 1) {
            if self.done() {
                return;
            }
            let (Some(inner), Some(outer)) = (
                edge_copy(self.sys, &sorted_with(&s, u), c),
                edge_copy(self.sys, &sorted_with(&s, v), c),
            ) else {
                continue;
            };
            for &x in &s {
                self.used[x as usize] = true;
            }
            self.interior.push(inner);
            self.exterior.push(outer);
            self.choose_sets(i + 1);
            self.exterior.pop();
            self.interior.pop();
            for &x in &s {
                self.used[x as usize] = false;
            }
        }
    }
}

/// Tries to turn an interior packing `member` into an absorber for `target`
/// with the extra colors `new_colors`, leaving the member's copies as they are.
pub fn complete_absorber(
    sys: &GraphSystem,
    pattern: &PatternF,
    member: &RainbowPacking,
    target: &[Vertex],
    new_colors: &[usize],
) -> Option<RainbowAbsorber> {
    let gadget = Gadget::for_pattern(pattern)?;
    if member.len() != gadget.interior_copies(pattern) || target.len() != pattern.b() || new_colors.len() != pattern.f()
    {
        return None;
    }
    let a = match gadget {
        Gadget::Clique => complete_clique(sys, pattern, member, target, new_colors),
        Gadget::Matching => complete_matching(sys, member, target, new_colors[0]),
    }?;
    debug_assert!(validate_absorber(&a, sys, pattern).is_ok());
    Some(a)
}

fn complete_clique(
    sys: &GraphSystem,
    pattern: &PatternF,
    member: &RainbowPacking,
    target: &[Vertex],
    new_colors: &[usize],
) -> Option<RainbowAbsorber> {
    let t = pattern.b();
    let mut palette = new_colors.to_vec();
    palette.sort_unstable();
    // ext[j][p][i]: exterior for member copy j swapping its p-th vertex for target i
    let sets: Vec<Vec<Vertex>> = member.copies.iter().map(|c| c.vertex_set()).collect();
    let ext: Vec<Vec<Vec<Option<RainbowCopy>>>> = member
        .copies
        .iter()
        .zip(&sets)
        .map(|(copy, set)| {
            set.iter()
                .map(|&v| {
                    target
                        .iter()
                        .map(|&u| matching_exterior(sys, pattern, copy, v, u))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut assign: Vec<usize> = (0..t).collect();
    let mut found = None;
    permutations(&mut assign, 0, &mut |perm| {
        // target i is paired with member copy perm[i]
        let mut pick = vec![0usize; t];
        loop {
            let ok = (0..t).all(|i| ext[perm[i]][pick[i]][i].is_some());
            if ok {
                let mut bridge_set: Vec<Vertex> = (0..t).map(|i| sets[perm[i]][pick[i]]).collect();
                bridge_set.sort_unstable();
                if let Some(bridge) = first_copy_on_set(sys, pattern, &bridge_set, &palette) {
                    let mut exterior = vec![bridge];
                    exterior.extend((0..t).map(|i| ext[perm[i]][pick[i]][i].clone().expect("checked")));
                    let mut internal: Vec<Vertex> = sets.concat();
                    internal.sort_unstable();
                    found = Some(RainbowAbsorber {
                        target: target.to_vec(),
                        internal,
                        interior: member.clone(),
                        exterior: RainbowPacking::new(exterior),
                    });
                    return false;
                }
            }
            // next choice of swapped vertices
            let mut i = 0;
            while i < t {
                pick[i] += 1;
                if pick[i] < t {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == t {
                return true;
            }
        }
    });
    found
}

fn complete_matching(
    sys: &GraphSystem,
    member: &RainbowPacking,
    target: &[Vertex],
    new_color: usize,
) -> Option<RainbowAbsorber> {
    let k = target.len();
    let mut order: Vec<usize> = (0..k).collect();
    let mut found = None;
    permutations(&mut order, 0, &mut |tperm| {
        let v: Vec<Vertex> = tperm.iter().map(|&i| target[i]).collect();
        let mut eorder: Vec<usize> = (0..k - 1).collect();
        let mut go_on = true;
        permutations(&mut eorder, 0, &mut |eperm| {
            // gadget position i (2..=k) uses member edge eperm[i - 2]
            let edges: Vec<&RainbowCopy> = eperm.iter().map(|&j| &member.copies[j]).collect();
            let mut pick = vec![0usize; k - 1];
            loop {
                let u: Vec<Vertex> = (0..k - 1).map(|i| edges[i].embedding[pick[i]]).collect();
                let mut first = u.clone();
                first.push(v[0]);
                if let Some(first) = edge_copy(sys, &first, new_color) {
                    let rest: Option<Vec<RainbowCopy>> = (0..k - 1)
                        .map(|i| {
                            let s: Vec<Vertex> = edges[i].embedding.iter().copied().filter(|&x| x != u[i]).collect();
                            edge_copy(sys, &sorted_with(&s, v[i + 1]), edges[i].colors[0])
                        })
                        .collect();
                    if let Some(rest) = rest {
                        let mut exterior = vec![first];
                        exterior.extend(rest);
                        let mut internal = member.vertices();
                        internal.sort_unstable();
                        found = Some(RainbowAbsorber {
                            target: v.clone(),
                            internal,
                            interior: member.clone(),
                            exterior: RainbowPacking::new(exterior),
                        });
                        go_on = false;
                        return false;
                    }
                }
                let mut i = 0;
                while i < k - 1 {
                    pick[i] += 1;
                    if pick[i] < k {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == k - 1 {
                    return true;
                }
            }
        });
        go_on
    });
    found
}

/// Visits permutations of `items[start..]` in place; stops when `visit`
/// returns false. Returns whether the visit ran to completion.
fn permutations(items: &mut [usize], start: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if start == items.len() {
        return visit(items);
    }
    for i in start..items.len() {
        items.swap(start, i);
        let go_on = permutations(items, start + 1, visit);
        items.swap(start, i);
        if !go_on {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DirectedKGraph;

    fn complete_system(n: usize, m: usize) -> GraphSystem {
        GraphSystem::replicate(&DirectedKGraph::complete(n, 2).unwrap(), m).unwrap()
    }

    fn hand_matching_absorber() -> RainbowAbsorber {
        // T = {0, 1}, u_2 = 2, U_2 = {3}
        RainbowAbsorber {
            target: vec![0, 1],
            internal: vec![2, 3],
            interior: RainbowPacking::new(vec![RainbowCopy::new(vec![2, 3], vec![1])]),
            exterior: RainbowPacking::new(vec![
                RainbowCopy::new(vec![0, 2], vec![0]),
                RainbowCopy::new(vec![1, 3], vec![1]),
            ]),
        }
    }

    #[test]
    fn hand_absorber_validates_and_swaps() {
        let sys = complete_system(5, 2);
        let e = PatternF::single_edge(2).unwrap();
        let a = hand_matching_absorber();
        validate_absorber(&a, &sys, &e).unwrap();
        let int = absorb(&a, &sys, &e, AbsorbMode::Interior).unwrap();
        let ext = absorb(&a, &sys, &e, AbsorbMode::Exterior).unwrap();
        assert_eq!(int.len(), 1);
        assert_eq!(ext.len(), 2);
        assert_eq!(ext.vertices().len() - int.vertices().len(), 2);
        assert_eq!(ext.colors().len() - int.colors().len(), 1);
        assert_eq!(a.new_colors(), vec![0]);
    }

    #[test]
    fn validation_reasons() {
        let sys = complete_system(5, 2);
        let e = PatternF::single_edge(2).unwrap();
        let mut a = hand_matching_absorber();
        a.internal = vec![1, 2, 3];
        assert_eq!(validate_absorber(&a, &sys, &e).unwrap_err(), "B∩L nonempty");
        let mut a = hand_matching_absorber();
        a.exterior.copies[0].colors = vec![1];
        assert!(validate_absorber(&a, &sys, &e).unwrap_err().contains("color clash"));
    }

    #[test]
    fn matching_absorbers_small() {
        let sys = complete_system(5, 2);
        let e = PatternF::single_edge(2).unwrap();
        let all = enumerate_matching_absorbers(&sys, &e, &[0, 1], &[0, 1], usize::MAX).unwrap();
        assert_eq!(all.len(), 3 * 2);
        assert_eq!(all[0], hand_matching_absorber());
        for a in &all {
            validate_absorber(a, &sys, &e).unwrap();
        }
        assert!(enumerate_matching_absorbers(&sys, &e, &[0, 1], &[0, 1], 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn clique_absorbers_need_room() {
        let k3 = PatternF::clique(3).unwrap();
        let small = complete_system(6, 12);
        let colors: Vec<usize> = (0..12).collect();
        assert!(enumerate_clique_absorbers(&small, &k3, &[0, 1, 2], &colors, usize::MAX)
            .unwrap()
            .is_empty());
        let sys = complete_system(12, 12);
        let found = enumerate_clique_absorbers(&sys, &k3, &[0, 1, 2], &colors, 5).unwrap();
        assert_eq!(found.len(), 5);
        for a in &found {
            validate_absorber(a, &sys, &k3).unwrap();
            assert_eq!(a.internal.len(), 9);
        }
    }

    #[test]
    fn malformed_inputs() {
        let k3 = PatternF::clique(3).unwrap();
        let sys = complete_system(12, 12);
        assert!(enumerate_clique_absorbers(&sys, &k3, &[0, 1], &[0; 12], 1).is_err());
        let colors: Vec<usize> = (0..11).collect();
        assert!(enumerate_clique_absorbers(&sys, &k3, &[0, 1, 2], &colors, 1).is_err());
        let e = PatternF::single_edge(2).unwrap();
        assert!(enumerate_clique_absorbers(&sys, &e, &[0, 1], &[0, 1, 2], 1).is_err());
    }

    #[test]
    fn completion_from_interior() {
        let k3 = PatternF::clique(3).unwrap();
        let sys = complete_system(12, 12);
        let colors: Vec<usize> = (0..12).collect();
        let a = &enumerate_clique_absorbers(&sys, &k3, &[0, 1, 2], &colors, 1).unwrap()[0];
        let again = complete_absorber(&sys, &k3, &a.interior, &[0, 1, 2], &a.new_colors()).unwrap();
        validate_absorber(&again, &sys, &k3).unwrap();

        let e = PatternF::single_edge(2).unwrap();
        let sys = complete_system(5, 2);
        let member = RainbowPacking::new(vec![RainbowCopy::new(vec![2, 3], vec![1])]);
        let a = complete_absorber(&sys, &e, &member, &[0, 1], &[0]).unwrap();
        validate_absorber(&a, &sys, &e).unwrap();
    }
}
