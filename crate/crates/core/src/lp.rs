//! Exact rational simplex for the small equality-form programs that arise in
//! membership, subset and distance questions:
//!
//! maximize `c . x` subject to `A x = b`, `x >= 0`.
//!
//! Two-phase dense tableau with Bland's rule, so it cannot cycle.

use num_traits::{One, Signed, Zero};

use crate::dyadic::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, x: Vec<Rational> },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    obj: Vec<Rational>,
    obj_rhs: Rational,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.obj_rhs -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, c: Vec<Rational>) {
        self.obj = c;
        self.obj_rhs = Rational::zero();
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if self.obj[b].is_zero() {
                continue;
            }
            let f = self.obj[b].clone();
            for (v, rv) in self.obj.iter_mut().zip(&self.rows[i]) {
                if !rv.is_zero() {
                    *v -= &f * rv;
                }
            }
            self.obj_rhs -= &f * &self.rhs[i];
        }
    }

    /// Returns false when the objective is unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j].is_positive()) else {
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
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Solves `max c.x  s.t.  A x = b, x >= 0`.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rational> = a[i]
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        row.extend((0..m).map(|k| {
            if k == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        rows.push(row);
        rhs.push(if flip { -&b[i] } else { b[i].clone() });
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        obj: Vec::new(),
        obj_rhs: Rational::zero(),
    };

    // Phase one: drive the artificial variables to zero.
    let mut phase1 = vec![Rational::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = -Rational::one();
    }
    t.set_objective(phase1);
    t.optimize(n + m);
    if !t.obj_rhs.is_zero() {
        return LpOutcome::Infeasible;
    }
    // Pivot remaining zero-level artificials out, dropping redundant rows.
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

    let mut phase2: Vec<Rational> = c.to_vec();
    phase2.extend((0..m).map(|_| Rational::zero()));
    t.set_objective(phase2);
    if !t.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs[i].clone();
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { value, x }
}

/// A nonnegative solution of `A x = b`, if one exists.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    match maximize(a, b, &vec![Rational::zero(); n]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{int, rat};

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_maximization() {
        // max x + y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6
        let a = vec![row(&[1, 2, 1, 0]), row(&[3, 1, 0, 1])];
        let b = row(&[4, 6]);
        let c = row(&[1, 1, 0, 0]);
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, rat(14, 5));
                assert_eq!(x[0], rat(8, 5));
                assert_eq!(x[1], rat(6, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x + y = -1 with x, y >= 0
        assert_eq!(
            maximize(&[row(&[1, 1])], &row(&[-1]), &row(&[0, 0])),
            LpOutcome::Infeasible
        );
        // max x  s.t. x - y = 1
        assert_eq!(
            maximize(&[row(&[1, -1])], &row(&[1]), &row(&[1, 0])),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn redundant_rows() {
        let a = vec![row(&[1, 1]), row(&[2, 2])];
        let b = row(&[1, 2]);
        let x = feasible_point(&a, &b).unwrap();
        assert_eq!(&x[0] + &x[1], int(1));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // A classic cycling example for the largest-coefficient rule.
        let a = vec![
            vec![rat(1, 2), rat(-11, 2), rat(-5, 2), int(9), int(1), int(0), int(0)],
            vec![rat(1, 2), rat(-3, 2), rat(-1, 2), int(1), int(0), int(1), int(0)],
            vec![int(1), int(0), int(0), int(0), int(0), int(0), int(1)],
        ];
        let b = row(&[0, 0, 1]);
        let c = vec![int(10), int(-57), int(-9), int(-24), int(0), int(0), int(0)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(1)),
            other => panic!("{other:?}"),
        }
    }
}
