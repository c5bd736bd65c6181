//! Dense-tableau simplex over exact rationals with Bland's rule.
//!
//! All variables are non-negative. Problems with `>=` or `=` rows go through a
//! first phase minimizing the sum of artificial variables.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, Q)>,
    pub kind: RowKind,
    pub rhs: Q,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<Q>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        LinearProgram {
            num_vars,
            sense,
            objective: vec![Q::zero(); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Q)>, kind: RowKind, rhs: Q) {
        self.rows.push(Row { coeffs, kind, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// `rows x (cols + 1)`, last entry is the right-hand side.
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
    artificial_from: usize,
}

type SparseRow = Vec<(usize, Q)>;

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars;
        let rows: Vec<(SparseRow, RowKind, Q)> = lp
            .rows
            .iter()
            .map(|r| {
                if r.rhs.is_negative() {
                    let kind = match r.kind {
                        RowKind::Le => RowKind::Ge,
                        RowKind::Ge => RowKind::Le,
                        RowKind::Eq => RowKind::Eq,
                    };
                    (r.coeffs.iter().map(|(j, c)| (*j, -c)).collect(), kind, -&r.rhs)
                } else {
                    (r.coeffs.clone(), r.kind, r.rhs.clone())
                }
            })
            .collect();
        let slacks = rows.iter().filter(|r| r.1 != RowKind::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != RowKind::Le).count();
        let cols = n + slacks + artificials;
        let artificial_from = n + slacks;
        let mut t = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut s, mut a) = (n, artificial_from);
        for (coeffs, kind, rhs) in rows {
            let mut row = vec![Q::zero(); cols + 1];
            for (j, c) in coeffs {
                row[j] += c;
            }
            row[cols] = rhs;
            match kind {
                RowKind::Le => {
                    row[s] = Q::one();
                    basis.push(s);
                    s += 1;
                }
                RowKind::Ge => {
                    row[s] = -Q::one();
                    s += 1;
                    row[a] = Q::one();
                    basis.push(a);
                    a += 1;
                }
                RowKind::Eq => {
                    row[a] = Q::one();
                    basis.push(a);
                    a += 1;
                }
            }
            t.push(row);
        }
        Tableau {
            t,
            basis,
            cols,
            artificial_from,
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        if self.artificial_from < self.cols {
            // phase one: maximize minus the sum of artificials
            let mut cost = vec![Q::zero(); self.cols];
            for c in cost.iter_mut().skip(self.artificial_from) {
                *c = -Q::one();
            }
            let limit = self.cols;
            if !self.optimize(&cost, limit) {
                unreachable!("phase one is bounded");
            }
            let infeasible = self
                .basis
                .iter()
                .zip(&self.t)
                .any(|(&b, row)| b >= self.artificial_from && !row[self.cols].is_zero());
            if infeasible {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
        }
        let mut cost = vec![Q::zero(); self.cols];
        for (j, c) in lp.objective.iter().enumerate() {
            cost[j] = match lp.sense {
                Sense::Maximize => c.clone(),
                Sense::Minimize => -c,
            };
        }
        let limit = self.artificial_from;
        if !self.optimize(&cost, limit) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); lp.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.num_vars {
                x[b] = self.t[i][self.cols].clone();
            }
        }
        let value = x
            .iter()
            .zip(&lp.objective)
            .fold(Q::zero(), |acc, (xi, ci)| acc + xi * ci);
        LpOutcome::Optimal { x, value }
    }

    /// Pivots artificial variables that stay basic at level zero out of the
    /// basis; rows where that is impossible are redundant and dropped.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= self.artificial_from {
                match (0..self.artificial_from).find(|&j| !self.t[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.t.swap_remove(i);
                        self.basis.swap_remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    /// Maximizes `cost . x` using columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Q], limit: usize) -> bool {
        let rhs = self.cols;
        loop {
            // reduced costs: c_j - c_B B^-1 A_j
            let mut basic = vec![false; self.cols];
            for &b in &self.basis {
                basic[b] = true;
            }
            let mut entering = None;
            for j in 0..limit {
                if basic[j] {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, row) in self.t.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        r -= cb * &row[j];
                    }
                }
                if r.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if row[j].is_positive() {
                    let ratio = &row[rhs] / &row[j];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }

    fn pivot(&mut self, p: usize, j: usize) {
        let inv = self.t[p][j].recip();
        for x in self.t[p].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let support: Vec<usize> = (0..=self.cols).filter(|&c| !self.t[p][c].is_zero()).collect();
        let prow = std::mem::take(&mut self.t[p]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == p || row[j].is_zero() {
                continue;
            }
            let factor = row[j].clone();
            for &c in &support {
                let delta = &factor * &prow[c];
                row[c] -= delta;
            }
        }
        self.t[p] = prow;
        self.basis[p] = j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn small_max_problem() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.objective = vec![q(3, 1), q(2, 1)];
        lp.add_row(vec![(0, q(1, 1)), (1, q(1, 1))], RowKind::Le, q(4, 1));
        lp.add_row(vec![(0, q(1, 1)), (1, q(3, 1))], RowKind::Le, q(6, 1));
        lp.add_row(vec![(0, q(1, 1))], RowKind::Le, q(3, 1));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(11, 1));
                assert_eq!(x, vec![q(3, 1), q(1, 1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn min_with_ge_rows() {
        // min x + y, x + 2y >= 2, 3x + y >= 3
        let mut lp = LinearProgram::new(2, Sense::Minimize);
        lp.objective = vec![q(1, 1), q(1, 1)];
        lp.add_row(vec![(0, q(1, 1)), (1, q(2, 1))], RowKind::Ge, q(2, 1));
        lp.add_row(vec![(0, q(3, 1)), (1, q(1, 1))], RowKind::Ge, q(3, 1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(7, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.add_row(vec![(0, q(1, 1))], RowKind::Ge, q(2, 1));
        lp.add_row(vec![(0, q(1, 1))], RowKind::Le, q(1, 1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.objective = vec![q(1, 1)];
        lp.add_row(vec![(0, q(1, 1))], RowKind::Ge, q(1, 1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_with_redundant_row() {
        // x + y = 1 twice, max x
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.objective = vec![q(1, 1), q(0, 1)];
        lp.add_row(vec![(0, q(1, 1)), (1, q(1, 1))], RowKind::Eq, q(1, 1));
        lp.add_row(vec![(0, q(2, 1)), (1, q(2, 1))], RowKind::Eq, q(2, 1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // max -x, -x <= -2  (x >= 2)
        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.objective = vec![q(-1, 1)];
        lp.add_row(vec![(0, q(-1, 1))], RowKind::Le, q(-2, 1));
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => assert_eq!(x[0], q(2, 1)),
            other => panic!("{other:?}"),
        }
    }
}
