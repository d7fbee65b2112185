//! Primal active-set simplex started from a caller-supplied vertex.
//!
//! Rows are indexed as in the program, with `num_rows + j` standing for the
//! bound `x_j ≥ 0` of a non-negative variable. All rows are handled in `≥`
//! orientation. Any trouble (singular working set, infeasible start, iteration
//! limit) yields `None` and the caller falls back to the tableau.

use num_traits::{Signed, Zero};

use super::sparse::SparseLu;
use super::{LinearProgram, MinOutcome, Relation, VarSign};
use crate::rational::Rational;

struct Rows<'a> {
    lp: &'a LinearProgram,
    bound: Vec<Vec<(usize, Rational)>>,
}

impl<'a> Rows<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let one = Rational::from_integer(1.into());
        let bound = (0..lp.num_vars()).map(|j| vec![(j, one.clone())]).collect();
        Rows { lp, bound }
    }

    fn count(&self) -> usize {
        self.lp.num_rows() + self.lp.num_vars()
    }

    fn exists(&self, r: usize) -> bool {
        let m = self.lp.num_rows();
        r < m || (r < self.count() && self.lp.signs[r - m] == VarSign::NonNegative)
    }

    fn sigma(&self, r: usize) -> i8 {
        match self.lp.constraints.get(r) {
            Some(c) if c.relation == Relation::Le => -1,
            _ => 1,
        }
    }

    /// Oriented coefficients and right-hand side of row `r`.
    fn row(&self, r: usize) -> (Vec<(usize, Rational)>, Rational) {
        let m = self.lp.num_rows();
        if r >= m {
            return (self.bound[r - m].clone(), Rational::zero());
        }
        let c = &self.lp.constraints[r];
        if self.sigma(r) < 0 {
            (
                c.terms.iter().map(|(j, a)| (*j, -a)).collect(),
                -c.rhs.clone(),
            )
        } else {
            (c.terms.clone(), c.rhs.clone())
        }
    }

    fn dot(&self, r: usize, x: &[Rational]) -> Rational {
        let m = self.lp.num_rows();
        if r >= m {
            return x[r - m].clone();
        }
        let v = self.lp.constraints[r].lhs(x);
        if self.sigma(r) < 0 {
            -v
        } else {
            v
        }
    }

    fn rhs(&self, r: usize) -> Rational {
        let m = self.lp.num_rows();
        if r >= m {
            Rational::zero()
        } else if self.sigma(r) < 0 {
            -self.lp.constraints[r].rhs.clone()
        } else {
            self.lp.constraints[r].rhs.clone()
        }
    }

    fn is_equality(&self, r: usize) -> bool {
        self.lp
            .constraints
            .get(r)
            .is_some_and(|c| c.relation == Relation::Eq)
    }
}

pub(super) fn solve_from(lp: &LinearProgram, hint: &[usize]) -> Option<(MinOutcome, Vec<usize>)> {
    let n = lp.num_vars();
    let m = lp.num_rows();
    let rows = Rows::new(lp);

    let mut working: Vec<usize> = (0..m).filter(|&r| rows.is_equality(r)).collect();
    for &r in hint {
        if !rows.exists(r) {
            return None;
        }
        working.push(r);
    }
    working.sort_unstable();
    working.dedup();
    if working.len() != n {
        return None;
    }

    let limit = 20 * (m + n) + 100;
    let mut x: Option<Vec<Rational>> = None;
    for _ in 0..limit {
        let oriented: Vec<(Vec<(usize, Rational)>, Rational)> =
            working.iter().map(|&r| rows.row(r)).collect();
        let matrix: Vec<Vec<(usize, Rational)>> = oriented.iter().map(|(a, _)| a.clone()).collect();
        let lu = SparseLu::factor(&matrix, n)?;

        let point = match x.take() {
            Some(p) => p,
            None => {
                let b: Vec<Rational> = oriented.iter().map(|(_, b)| b.clone()).collect();
                let p = lu.solve(&b);
                if (0..rows.count()).any(|r| rows.exists(r) && rows.dot(r, &p) < rows.rhs(r)) {
                    return None;
                }
                p
            }
        };

        let mut transposed = vec![Vec::new(); n];
        for (k, (a, _)) in oriented.iter().enumerate() {
            for (j, c) in a {
                transposed[*j].push((k, c.clone()));
            }
        }
        let lut = SparseLu::factor(&transposed, n)?;
        let w = lut.solve(&lp.objective);

        let leaving = working
            .iter()
            .enumerate()
            .filter(|(k, &r)| !rows.is_equality(r) && w[*k].is_negative())
            .map(|(k, _)| k)
            .next();

        let Some(k) = leaving else {
            let mut dual = vec![Rational::zero(); m];
            for (k, &r) in working.iter().enumerate() {
                if r < m {
                    dual[r] = if rows.sigma(r) < 0 {
                        -w[k].clone()
                    } else {
                        w[k].clone()
                    };
                }
            }
            let objective = lp.objective_value(&point);
            return Some((
                MinOutcome::Optimal {
                    primal: point,
                    dual,
                    objective,
                },
                working,
            ));
        };

        let mut e = vec![Rational::zero(); n];
        e[k] = Rational::from_integer(1.into());
        let d = lu.solve(&e);

        let mut best: Option<(usize, Rational)> = None;
        for s in 0..rows.count() {
            if !rows.exists(s) || working.binary_search(&s).is_ok() {
                continue;
            }
            let ad = rows.dot(s, &d);
            if !ad.is_negative() {
                continue;
            }
            let step = (rows.dot(s, &point) - rows.rhs(s)) / -ad;
            if best.as_ref().map_or(true, |(_, t)| step < *t) {
                best = Some((s, step));
            }
        }
        let Some((s, step)) = best else {
            return Some((MinOutcome::Unbounded { point, ray: d }, working));
        };
        let moved = point.iter().zip(&d).map(|(p, dj)| p + &step * dj).collect();
        x = Some(moved);
        working.remove(k);
        let pos = working.binary_search(&s).unwrap_err();
        working.insert(pos, s);
    }
    None
}
