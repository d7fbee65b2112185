//! Exact sparse elimination for square systems.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::rational::{sum, Rational};

/// A recorded elimination of a square matrix, replayable on right-hand sides.
pub(super) struct SparseLu {
    n: usize,
    /// `(target, source, factor)`: `rhs[target] -= factor · rhs[source]`.
    ops: Vec<(usize, usize, Rational)>,
    /// `(row, column)` in elimination order.
    pivots: Vec<(usize, usize)>,
    rows: Vec<BTreeMap<usize, Rational>>,
}

impl SparseLu {
    /// Factors the `n × n` matrix given by its sparse rows. `None` if singular.
    pub(super) fn factor(input: &[Vec<(usize, Rational)>], n: usize) -> Option<SparseLu> {
        if input.len() != n {
            return None;
        }
        let mut rows: Vec<BTreeMap<usize, Rational>> = input
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| (*j, c.clone()))
                    .collect()
            })
            .collect();
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for &j in row.keys() {
                if j >= n {
                    return None;
                }
                col_rows[j].insert(i);
            }
        }
        let mut queue: BTreeSet<(usize, usize)> =
            rows.iter().enumerate().map(|(i, r)| (r.len(), i)).collect();
        let mut ops = Vec::new();
        let mut pivots = Vec::with_capacity(n);

        while let Some((nnz, pr)) = queue.pop_first() {
            if nnz == 0 {
                return None;
            }
            let pc = *rows[pr].keys().min_by_key(|&&j| (col_rows[j].len(), j))?;
            for &j in rows[pr].keys() {
                col_rows[j].remove(&pr);
            }
            let pivot_row = std::mem::take(&mut rows[pr]);
            let pivot_val = pivot_row[&pc].clone();
            let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
            for t in targets {
                let factor = &rows[t][&pc] / &pivot_val;
                queue.remove(&(rows[t].len(), t));
                for (&j, c) in &pivot_row {
                    let entry = rows[t].entry(j).or_insert_with(Rational::zero);
                    *entry -= &factor * c;
                    if entry.is_zero() {
                        rows[t].remove(&j);
                        col_rows[j].remove(&t);
                    } else {
                        col_rows[j].insert(t);
                    }
                }
                queue.insert((rows[t].len(), t));
                ops.push((t, pr, factor));
            }
            rows[pr] = pivot_row;
            pivots.push((pr, pc));
        }
        Some(SparseLu {
            n,
            ops,
            pivots,
            rows,
        })
    }

    /// Solves `A x = rhs`.
    pub(super) fn solve(&self, rhs: &[Rational]) -> Vec<Rational> {
        // Subtractions into each entry are collected and summed pairwise
        // just before the entry is read.
        let mut b = rhs.to_vec();
        let mut pending: Vec<Vec<Rational>> = vec![Vec::new(); b.len()];
        let flush = |b: &mut Vec<Rational>, pending: &mut Vec<Vec<Rational>>, i: usize| {
            if !pending[i].is_empty() {
                let terms = std::mem::take(&mut pending[i]);
                b[i] -= sum(terms);
            }
        };
        for (t, s, f) in &self.ops {
            flush(&mut b, &mut pending, *s);
            if !b[*s].is_zero() {
                pending[*t].push(f * &b[*s]);
            }
        }
        let mut x = vec![Rational::zero(); self.n];
        for &(r, c) in self.pivots.iter().rev() {
            flush(&mut b, &mut pending, r);
            let rest = sum(self.rows[r]
                .iter()
                .filter(|(j, _)| **j != c && !x[**j].is_zero())
                .map(|(j, a)| a * &x[*j]));
            x[c] = (&b[r] - rest) / &self.rows[r][&c];
        }
        x
    }
}
