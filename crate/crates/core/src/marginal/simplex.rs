//! Dense two-phase simplex over exact rationals, Bland's rule throughout.
//!
//! Solves `min c·x  s.t.  A x = b, x >= 0`. Sizes here are tiny (at most a
//! few dozen columns), so a full tableau is kept.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Reduced costs for `cost` over the columns `0..cols`.
    fn reduced_costs(&self, cost: &[Rational], cols: usize) -> Vec<Rational> {
        (0..cols)
            .map(|j| {
                let mut r = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &cost[bi] * &self.rows[i][j];
                    }
                }
                r
            })
            .collect()
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(Rational::zero(), |acc, (&bi, r)| acc + &cost[bi] * r)
    }

    /// Runs simplex iterations on columns `0..cols`. Returns false when
    /// unbounded.
    fn optimize(&mut self, cost: &[Rational], cols: usize) -> bool {
        loop {
            let reduced = self.reduced_costs(cost, cols);
            let Some(enter) = (0..cols).find(|&j| reduced[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return false,
            }
        }
    }
}

pub fn solve_standard(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Phase 1: artificial identity block, rows sign-normalised so b >= 0.
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Rational> = row.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        r.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
        rows.push(r);
        rhs.push(if flip { -bi.clone() } else { bi.clone() });
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
    };
    let mut phase1_cost = vec![Rational::zero(); n + m];
    for v in &mut phase1_cost[n..] {
        *v = Rational::from_integer(1.into());
    }
    t.optimize(&phase1_cost, n + m);
    if t.objective(&phase1_cost).is_positive() {
        return LpOutcome::Infeasible;
    }

    // Drive zero-valued artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2 over the original columns only.
    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    if !t.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (&bi, r) in t.basis.iter().zip(&t.rhs) {
        if bi < n {
            x[bi] = r.clone();
        }
    }
    let value = x.iter().zip(c).fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![v(&[1, 2, 1, 0]), v(&[3, 1, 0, 1])];
        let b = v(&[4, 6]);
        let c = v(&[-1, -1, 0, 0]);
        match solve_standard(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x[0], rat(8, 5));
                assert_eq!(x[1], rat(6, 5));
                assert_eq!(value, rat(-14, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible() {
        // x + y = 1 and x + y = 2
        let a = vec![v(&[1, 1]), v(&[1, 1])];
        assert_eq!(solve_standard(&a, &v(&[1, 2]), &v(&[0, 0])), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        // min -x s.t. x - y = 1
        let a = vec![v(&[1, -1])];
        assert_eq!(solve_standard(&a, &v(&[1]), &v(&[-1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        // x + y = 1, -x - y = -1 (redundant), min x
        let a = vec![v(&[1, 1]), v(&[-1, -1])];
        match solve_standard(&a, &v(&[1, -1]), &v(&[1, 0])) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, int(0));
                assert_eq!(x, v(&[0, 1]));
            }
            other => panic!("{other:?}"),
        }
    }

    // Degenerate problem that cycles under the largest-coefficient rule
    // (Beale's example); Bland's rule must terminate at the optimum -1/20.
    #[test]
    fn beale_does_not_cycle() {
        let a = vec![
            vec![rat(1, 4), int(-60), rat(-1, 25), int(9), int(1), int(0), int(0)],
            vec![rat(1, 2), int(-90), rat(-1, 50), int(3), int(0), int(1), int(0)],
            vec![int(0), int(0), int(1), int(0), int(0), int(0), int(1)],
        ];
        let b = v(&[0, 0, 1]);
        let c = vec![rat(-3, 4), int(150), rat(-1, 50), int(6), int(0), int(0), int(0)];
        match solve_standard(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(-1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
