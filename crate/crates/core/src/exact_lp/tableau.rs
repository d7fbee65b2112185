//! Dense two-phase tableau simplex with Bland's rule.
//!
//! The program is brought to standard form `min c·x, A x = b, x ≥ 0, b ≥ 0`
//! (free variables split, slacks appended, rows with negative right-hand side
//! negated) and every row receives an artificial column. The artificial block
//! of the tableau is therefore `B⁻¹` at every step, which is where dual values
//! and Farkas rays are read from.

use num_traits::{Signed, Zero};

use super::{LinearProgram, MinOutcome, Relation, VarSign};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Where each original variable lives among the standard-form columns.
struct Layout {
    pos: Vec<usize>,
    neg: Vec<Option<usize>>,
    n_struct: usize,
}

struct Tableau {
    /// `m` rows of `width + 1` entries; the last one is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs, with `-z` in the last entry.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    n_struct: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width()]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let support: Vec<usize> = (0..=self.width())
            .filter(|&j| !self.rows[pr][j].is_zero())
            .collect();
        let pivot_row = std::mem::take(&mut self.rows[pr]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == pr || row[pc].is_zero() {
                continue;
            }
            let factor = row[pc].clone();
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
        }
        if !self.cost[pc].is_zero() {
            let factor = self.cost[pc].clone();
            for &j in &support {
                self.cost[j] -= &factor * &pivot_row[j];
            }
        }
        self.rows[pr] = pivot_row;
        self.basis[pr] = pc;
    }

    /// Runs Bland's rule over the structural columns until optimal.
    /// Returns the first column found without a positive entry when unbounded.
    fn run(&mut self) -> Option<usize> {
        loop {
            let Some(q) = (0..self.n_struct).find(|&j| self.cost[j].is_negative()) else {
                return None;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((i, _)) => self.pivot(i, q),
                None => return Some(q),
            }
        }
    }

    fn basic_values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.width()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs(i).clone();
        }
        x
    }
}

pub(crate) fn solve_min(lp: &LinearProgram) -> Result<MinOutcome> {
    let m = lp.num_rows();
    let n = lp.num_vars();

    let mut pos = Vec::with_capacity(n);
    let mut neg = Vec::with_capacity(n);
    let mut col = 0;
    for sign in &lp.signs {
        pos.push(col);
        col += 1;
        if *sign == VarSign::Free {
            neg.push(Some(col));
            col += 1;
        } else {
            neg.push(None);
        }
    }
    let mut slack = vec![None; m];
    for (r, row) in lp.constraints.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack[r] = Some(col);
            col += 1;
        }
    }
    let layout = Layout {
        pos,
        neg,
        n_struct: col,
    };
    let width = layout.n_struct + m;

    let mut row_sign = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    for (r, row) in lp.constraints.iter().enumerate() {
        let mut t = vec![Rational::zero(); width + 1];
        for (j, c) in &row.terms {
            t[layout.pos[*j]] = c.clone();
            if let Some(nc) = layout.neg[*j] {
                t[nc] = -c;
            }
        }
        if let Some(s) = slack[r] {
            t[s] = match row.relation {
                Relation::Le => Rational::from_integer(1.into()),
                _ => Rational::from_integer((-1).into()),
            };
        }
        t[width] = row.rhs.clone();
        if row.rhs.is_negative() {
            row_sign[r] = true;
            for v in t.iter_mut() {
                if !v.is_zero() {
                    *v = -v.clone();
                }
            }
        }
        t[layout.n_struct + r] = Rational::from_integer(1.into());
        rows.push(t);
    }

    // Phase one: minimise the sum of artificials.
    let mut cost = vec![Rational::zero(); width + 1];
    for t in &rows {
        for j in 0..layout.n_struct {
            if !t[j].is_zero() {
                cost[j] -= &t[j];
            }
        }
        cost[width] -= &t[width];
    }
    let mut tab = Tableau {
        rows,
        cost,
        basis: (layout.n_struct..width).collect(),
        n_struct: layout.n_struct,
    };
    if tab.run().is_some() {
        return Err(Error::Solver(
            "phase one reported an unbounded objective".into(),
        ));
    }
    let infeasibility = -tab.cost[width].clone();
    let unsign = |r: usize, v: Rational| if row_sign[r] { -v } else { v };
    if infeasibility.is_positive() {
        let one = Rational::from_integer(1.into());
        let signed = (0..m)
            .map(|r| unsign(r, &one - &tab.cost[layout.n_struct + r]))
            .collect();
        return Ok(MinOutcome::Infeasible { signed });
    }

    // Drive artificials out of the basis where possible; rows where that is
    // impossible are redundant and keep their artificial at zero.
    for i in 0..m {
        if tab.basis[i] >= layout.n_struct {
            if let Some(j) = (0..layout.n_struct).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase two.
    let mut c_std = vec![Rational::zero(); width];
    for (j, c) in lp.objective.iter().enumerate() {
        c_std[layout.pos[j]] = c.clone();
        if let Some(nc) = layout.neg[j] {
            c_std[nc] = -c;
        }
    }
    let mut cost = c_std.clone();
    cost.push(Rational::zero());
    for (i, &b) in tab.basis.iter().enumerate() {
        if c_std[b].is_zero() {
            continue;
        }
        for (j, v) in tab.rows[i].iter().enumerate() {
            if !v.is_zero() {
                cost[j] -= &c_std[b] * v;
            }
        }
    }
    tab.cost = cost;

    let to_original = |x: &[Rational]| -> Vec<Rational> {
        (0..n)
            .map(|j| match layout.neg[j] {
                Some(nc) => &x[layout.pos[j]] - &x[nc],
                None => x[layout.pos[j]].clone(),
            })
            .collect()
    };

    if let Some(q) = tab.run() {
        let mut d = vec![Rational::zero(); width];
        d[q] = Rational::from_integer(1.into());
        for (i, &b) in tab.basis.iter().enumerate() {
            d[b] = -tab.rows[i][q].clone();
        }
        let point = to_original(&tab.basic_values());
        return Ok(MinOutcome::Unbounded {
            point,
            ray: to_original(&d),
        });
    }

    let primal = to_original(&tab.basic_values());
    let dual = (0..m)
        .map(|r| unsign(r, -tab.cost[layout.n_struct + r].clone()))
        .collect();
    let objective = -tab.cost[width].clone();
    Ok(MinOutcome::Optimal {
        primal,
        dual,
        objective,
    })
}
