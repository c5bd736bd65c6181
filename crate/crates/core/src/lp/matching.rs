//! Fractional matchings and covers, perfect fractional matchings and Farkas
//! certificates for their absence.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::fb::FbGraph;

use super::hypergraph::Hypergraph;
use super::simplex::{LinearProgram, LpOutcome, RowKind, Sense, Q};
use super::LpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolutionKind {
    /// Weights on edges.
    Matching,
    /// Weights on vertices.
    Cover,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FractionalSolution {
    pub kind: SolutionKind,
    pub weights: Vec<Q>,
    pub value: Q,
}

/// A vector `a` with `a . 1 < 0` and `a . chi(e) >= 0` for every edge `e`:
/// it rules out a perfect fractional matching.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasCertificate {
    pub a: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PfmOutcome {
    pub perfect: bool,
    /// A maximum fractional matching; perfect when `perfect` holds.
    pub matching: FractionalSolution,
    pub certificate: Option<FarkasCertificate>,
}

pub(crate) fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub(crate) fn ratio(num: usize, den: usize) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

impl FractionalSolution {
    /// Checks bounds, feasibility and the stored value.
    pub fn check(&self, h: &Hypergraph) -> Result<(), String> {
        let expected_len = match self.kind {
            SolutionKind::Matching => h.num_edges(),
            SolutionKind::Cover => h.n(),
        };
        if self.weights.len() != expected_len {
            return Err(format!("{} weights for {expected_len} slots", self.weights.len()));
        }
        if self.weights.iter().any(|w| w.is_negative() || *w > Q::one()) {
            return Err("weight outside [0, 1]".into());
        }
        let total = self.weights.iter().fold(Q::zero(), |a, w| a + w);
        if total != self.value {
            return Err(format!("value {} differs from weight sum {total}", self.value));
        }
        match self.kind {
            SolutionKind::Matching => {
                let load = self.loads(h);
                if let Some(v) = load.iter().position(|l| *l > Q::one()) {
                    return Err(format!("vertex {v} overloaded"));
                }
            }
            SolutionKind::Cover => {
                for e in h.edges() {
                    let s = e.iter().fold(Q::zero(), |a, &v| a + &self.weights[v as usize]);
                    if s < Q::one() {
                        return Err(format!("edge {e:?} under-covered"));
                    }
                }
            }
        }
        Ok(())
    }

    /// For a matching, the total weight at each vertex.
    pub fn loads(&self, h: &Hypergraph) -> Vec<Q> {
        let mut load = vec![Q::zero(); h.n()];
        for (e, w) in h.edges().iter().zip(&self.weights) {
            if !w.is_zero() {
                for &v in e {
                    load[v as usize] += w;
                }
            }
        }
        load
    }

    /// Whether this matching saturates every vertex exactly.
    pub fn is_perfect(&self, h: &Hypergraph) -> bool {
        self.kind == SolutionKind::Matching && self.loads(h).iter().all(|l| l.is_one())
    }
}

impl FarkasCertificate {
    pub fn verify(&self, h: &Hypergraph) -> bool {
        if self.a.len() != h.n() {
            return false;
        }
        let total = self.a.iter().fold(Q::zero(), |acc, x| acc + x);
        total.is_negative()
            && h.edges().iter().all(|e| {
                !e.iter()
                    .fold(Q::zero(), |acc, &v| acc + &self.a[v as usize])
                    .is_negative()
            })
    }
}

/// Maximum fractional matching `nu*`.
pub fn max_fractional_matching(h: &Hypergraph) -> FractionalSolution {
    let mut lp = LinearProgram::new(h.num_edges(), Sense::Maximize);
    lp.objective = vec![Q::one(); h.num_edges()];
    let mut incident: Vec<Vec<(usize, Q)>> = vec![Vec::new(); h.n()];
    for (j, e) in h.edges().iter().enumerate() {
        for &v in e {
            incident[v as usize].push((j, Q::one()));
        }
    }
    for row in incident.into_iter().filter(|r| !r.is_empty()) {
        lp.add_row(row, RowKind::Le, Q::one());
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => FractionalSolution {
            kind: SolutionKind::Matching,
            weights: x,
            value,
        },
        other => unreachable!("matching LP is feasible and bounded, got {other:?}"),
    }
}

/// Minimum fractional cover `tau*`, solved as its own program.
pub fn min_fractional_cover(h: &Hypergraph) -> FractionalSolution {
    let mut lp = LinearProgram::new(h.n(), Sense::Minimize);
    lp.objective = vec![Q::one(); h.n()];
    for e in h.edges() {
        lp.add_row(
            e.iter().map(|&v| (v as usize, Q::one())).collect(),
            RowKind::Ge,
            Q::one(),
        );
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => FractionalSolution {
            kind: SolutionKind::Cover,
            weights: x,
            value,
        },
        other => unreachable!("cover LP is feasible and bounded, got {other:?}"),
    }
}

/// Decides whether a `b`-uniform hypergraph has a perfect fractional
/// matching (`nu* = n / b`). Otherwise returns `a = b * omega - 1` built from
/// an optimal cover `omega`: then `a . 1 = b tau* - n < 0` and every edge has
/// `a . chi(e) = b (omega(e) - 1) >= 0`.
pub fn has_perfect_fractional_matching(h: &Hypergraph, b: usize) -> Result<PfmOutcome, LpError> {
    if b == 0 {
        return Err(LpError::NonUniform { expected: 0, found: 0 });
    }
    h.require_uniform(b)?;
    let matching = max_fractional_matching(h);
    if matching.value == ratio(h.n(), b) {
        return Ok(PfmOutcome {
            perfect: true,
            matching,
            certificate: None,
        });
    }
    let cover = min_fractional_cover(h);
    let bq = int(b as i64);
    let a = cover.weights.iter().map(|w| &bq * w - Q::one()).collect();
    Ok(PfmOutcome {
        perfect: false,
        matching,
        certificate: Some(FarkasCertificate { a }),
    })
}

/// Solves the perfect fractional matching problem of a strict (f,b)-graph
/// on its full vertex set (colors first, then host vertices).
pub fn lift_block_pfm(g: &FbGraph) -> Result<(bool, FractionalSolution), LpError> {
    if !g.is_strict() {
        return Err(LpError::NotStrict);
    }
    let h = g.to_hypergraph();
    let out = has_perfect_fractional_matching(&h, g.f() + g.b())?;
    Ok((out.perfect, out.matching))
}

/// Combines perfect fractional matchings `omega_i` of the block b-graphs into
/// one of `g`, giving `I_i + e` the weight `(b / n) omega_i(e)`. Weights are
/// indexed like `g.edges()`.
pub fn combine_block_pfms(g: &FbGraph, blocks: &[FractionalSolution]) -> Result<FractionalSolution, LpError> {
    if !g.is_strict() {
        return Err(LpError::NotStrict);
    }
    if blocks.len() != g.num_blocks() {
        return Err(LpError::BlockCount {
            expected: g.num_blocks(),
            got: blocks.len(),
        });
    }
    let scale = ratio(g.b(), g.num_b().max(1));
    let mut weights = vec![Q::zero(); g.num_edges()];
    for (i, sol) in blocks.iter().enumerate() {
        for (pos, &idx) in g.block_edge_indices(i).iter().enumerate() {
            weights[idx] = &scale * &sol.weights[pos];
        }
    }
    let value = weights.iter().fold(Q::zero(), |a, w| a + w);
    Ok(FractionalSolution {
        kind: SolutionKind::Matching,
        weights,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(n: usize, edges: &[&[u32]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn triangle_values() {
        let t = hg(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        let m = max_fractional_matching(&t);
        assert_eq!(m.value, ratio(3, 2));
        assert!(m.weights.iter().all(|w| *w == ratio(1, 2)));
        let c = min_fractional_cover(&t);
        assert_eq!(c.value, ratio(3, 2));
        assert!(c.weights.iter().all(|w| *w == ratio(1, 2)));
        m.check(&t).unwrap();
        c.check(&t).unwrap();
    }

    #[test]
    fn single_edge_and_path() {
        let e = hg(3, &[&[0, 1, 2]]);
        assert_eq!(max_fractional_matching(&e).value, int(1));
        assert_eq!(min_fractional_cover(&e).value, int(1));
        let p = hg(3, &[&[0, 1], &[1, 2]]);
        let c = min_fractional_cover(&p);
        assert_eq!(c.value, int(1));
        assert_eq!(c.weights, vec![int(0), int(1), int(0)]);
    }

    #[test]
    fn complete_three_graph_on_four() {
        let h = hg(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
        assert_eq!(max_fractional_matching(&h).value, ratio(4, 3));
        assert_eq!(min_fractional_cover(&h).value, ratio(4, 3));
    }

    #[test]
    fn pfm_and_certificates() {
        let c4 = hg(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let out = has_perfect_fractional_matching(&c4, 2).unwrap();
        assert!(out.perfect && out.matching.is_perfect(&c4));

        let p3 = hg(3, &[&[0, 1], &[1, 2]]);
        let out = has_perfect_fractional_matching(&p3, 2).unwrap();
        assert!(!out.perfect);
        let cert = out.certificate.unwrap();
        assert!(cert.verify(&p3));
        assert_eq!(cert.a, vec![int(-1), int(1), int(-1)]);

        let star = hg(4, &[&[0, 1], &[0, 2], &[0, 3]]);
        let out = has_perfect_fractional_matching(&star, 2).unwrap();
        assert!(!out.perfect && out.certificate.unwrap().verify(&star));

        assert!(matches!(
            has_perfect_fractional_matching(&hg(3, &[&[0, 1], &[0, 1, 2]]), 2),
            Err(LpError::NonUniform { .. })
        ));
    }

    #[test]
    fn empty_hypergraphs() {
        let h = hg(0, &[]);
        assert!(has_perfect_fractional_matching(&h, 3).unwrap().perfect);
        let h = hg(2, &[]);
        assert_eq!(max_fractional_matching(&h).value, int(0));
        assert!(!has_perfect_fractional_matching(&h, 2).unwrap().perfect);
    }
}
