//! Exact rational linear programming with certificates.
//!
//! Every outcome carries the data needed to check it without trusting the
//! solver: a primal point and a dual vector with equal objectives, a Farkas
//! ray, or a feasible point plus an improving ray. [`verify`] re-checks those
//! identities from the problem data alone.
//!
//! Three internal routes share one contract:
//!
//! * a dense two-phase tableau simplex with Bland's rule (the default),
//! * the same tableau run on the dual program when the primal has many more
//!   rows than columns, mapping the certificates back,
//! * an active-set simplex started from a caller-supplied basis, using sparse
//!   exact elimination, for long chains of closely related programs.
//!
//! No floating point is involved anywhere.

mod active_set;
mod sparse;
mod tableau;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarSign {
    Free,
    NonNegative,
}

/// One row `Σ coef·x_var (relation) rhs`, stored sparsely with variable
/// indices strictly increasing and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    terms: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
}

impl Constraint {
    pub fn terms(&self) -> &[(usize, Rational)] {
        &self.terms
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    /// `a·x` for a dense point.
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        crate::rational::sum(self.terms.iter().map(|(j, c)| c * &x[*j]))
    }

    fn orientation(&self) -> i8 {
        match self.relation {
            Relation::Le => -1,
            Relation::Eq | Relation::Ge => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rational>,
    signs: Vec<VarSign>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>, signs: Vec<VarSign>) -> Result<Self> {
        if objective.len() != signs.len() {
            return Err(Error::Dimension(format!(
                "{} objective coefficients for {} variables",
                objective.len(),
                signs.len()
            )));
        }
        Ok(LinearProgram {
            sense,
            objective,
            signs,
            constraints: Vec::new(),
        })
    }

    /// Adds a row; repeated variables are summed and zero terms dropped.
    /// Returns the row index.
    pub fn add_constraint<I>(
        &mut self,
        terms: I,
        relation: Relation,
        rhs: Rational,
    ) -> Result<usize>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut terms: Vec<(usize, Rational)> = terms.into_iter().collect();
        if let Some((j, _)) = terms.iter().find(|(j, _)| *j >= self.num_vars()) {
            return Err(Error::Dimension(format!(
                "variable {j} in a program with {} variables",
                self.num_vars()
            )));
        }
        terms.sort_by_key(|(j, _)| *j);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        for (j, c) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == j => *acc += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint {
            terms: merged,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn signs(&self) -> &[VarSign] {
        &self.signs
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.signs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot_dense(&self.objective, x)
    }

    /// The same program as a minimisation (objective negated for `Max`).
    fn as_min(&self) -> LinearProgram {
        match self.sense {
            Sense::Min => self.clone(),
            Sense::Max => LinearProgram {
                sense: Sense::Min,
                objective: self.objective.iter().map(|c| -c).collect(),
                signs: self.signs.clone(),
                constraints: self.constraints.clone(),
            },
        }
    }

    /// Transposed column view: for each variable, `(row, coefficient)` pairs.
    fn columns(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut cols = vec![Vec::new(); self.num_vars()];
        for (r, row) in self.constraints.iter().enumerate() {
            for (j, c) in &row.terms {
                cols[*j].push((r, c.clone()));
            }
        }
        cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve`] together with its certificate.
///
/// Dual values are shadow prices: `dual[r]` is the rate of change of the
/// optimum in `rhs[r]`, so `Σ rhs·dual = objective` at optimality. Farkas
/// multipliers are non-negative on inequality rows after turning every `≤`
/// row into `≥` form, free on equality rows; they aggregate the system into
/// `g·x ≥ δ` with `g ≤ 0` on non-negative variables, `g = 0` on free ones and
/// `δ > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        primal: Vec<Rational>,
        dual: Vec<Rational>,
        objective: Rational,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible { .. } => LpStatus::Infeasible,
            LpOutcome::Unbounded { .. } => LpStatus::Unbounded,
        }
    }

    pub fn objective(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { objective, .. } => Some(objective),
            _ => None,
        }
    }

    pub fn primal(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { primal, .. } => Some(primal),
            _ => None,
        }
    }
}

/// Minimisation outcome in the signed-multiplier convention used internally:
/// `u_r ≥ 0` on `≥` rows, `≤ 0` on `≤` rows, free on `=` rows, both for the
/// optimal dual and for the Farkas ray.
#[derive(Debug, Clone)]
pub(crate) enum MinOutcome {
    Optimal {
        primal: Vec<Rational>,
        dual: Vec<Rational>,
        objective: Rational,
    },
    Infeasible {
        signed: Vec<Rational>,
    },
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let min = lp.as_min();
    let out = if prefers_dual_route(&min) {
        dual_route(&min).map_or_else(|| tableau::solve_min(&min), Ok)?
    } else {
        tableau::solve_min(&min)?
    };
    let outcome = finish(lp, out);
    debug_assert!(
        verify(lp, &outcome),
        "solver produced an unverifiable outcome"
    );
    Ok(outcome)
}

/// Outcome of [`solve_warm`], with the basis reached when the active-set
/// route was used.
#[derive(Debug, Clone)]
pub struct WarmSolve {
    pub outcome: LpOutcome,
    /// Rows (or `num_rows + j` for the bound `x_j ≥ 0`) tight at the final vertex.
    pub active_set: Option<Vec<usize>>,
}

/// Solves `lp` starting from the vertex where the rows in `hint` (plus all
/// equality rows) are tight. Falls back to [`solve`] when the hint does not
/// describe a feasible vertex.
pub fn solve_warm(lp: &LinearProgram, hint: &[usize]) -> Result<WarmSolve> {
    let min = lp.as_min();
    if let Some((out, active)) = active_set::solve_from(&min, hint) {
        let outcome = finish(lp, out);
        if verify(lp, &outcome) {
            return Ok(WarmSolve {
                outcome,
                active_set: Some(active),
            });
        }
    }
    Ok(WarmSolve {
        outcome: solve(lp)?,
        active_set: None,
    })
}

fn prefers_dual_route(lp: &LinearProgram) -> bool {
    lp.num_rows() > 2 * lp.num_vars() + 4
}

/// Converts an internal minimisation outcome back to the caller's sense and
/// multiplier conventions.
fn finish(lp: &LinearProgram, out: MinOutcome) -> LpOutcome {
    match out {
        MinOutcome::Optimal {
            primal,
            dual,
            objective,
        } => {
            let (dual, objective) = match lp.sense {
                Sense::Min => (dual, objective),
                Sense::Max => (dual.into_iter().map(|u| -u).collect(), -objective),
            };
            LpOutcome::Optimal {
                primal,
                dual,
                objective,
            }
        }
        MinOutcome::Infeasible { signed } => {
            let farkas = signed
                .into_iter()
                .zip(&lp.constraints)
                .map(|(u, row)| if row.orientation() < 0 { -u } else { u })
                .collect();
            LpOutcome::Infeasible { farkas }
        }
        MinOutcome::Unbounded { point, ray } => LpOutcome::Unbounded { point, ray },
    }
}

/// Solves the dual of a minimisation program with the tableau and maps the
/// result back. `None` when the dual is infeasible, which leaves the primal
/// status open.
fn dual_route(min: &LinearProgram) -> Option<MinOutcome> {
    // Dual: max Σ b_r w_r, one row per primal variable, one variable per
    // primal row. `≤` rows get w_r = -z_r with z_r ≥ 0.
    let flip: Vec<bool> = min
        .constraints
        .iter()
        .map(|r| r.relation == Relation::Le)
        .collect();
    let objective = min
        .constraints
        .iter()
        .zip(&flip)
        .map(|(r, f)| if *f { -r.rhs.clone() } else { r.rhs.clone() })
        .collect();
    let signs = min
        .constraints
        .iter()
        .map(|r| {
            if r.relation == Relation::Eq {
                VarSign::Free
            } else {
                VarSign::NonNegative
            }
        })
        .collect();
    let mut dual = LinearProgram::new(Sense::Max, objective, signs).ok()?;
    for (j, col) in min.columns().into_iter().enumerate() {
        let terms = col
            .into_iter()
            .map(|(r, c)| (r, if flip[r] { -c } else { c }));
        let relation = match min.signs[j] {
            VarSign::NonNegative => Relation::Le,
            VarSign::Free => Relation::Eq,
        };
        dual.add_constraint(terms, relation, min.objective[j].clone())
            .ok()?;
    }
    let unflip = |v: Vec<Rational>| -> Vec<Rational> {
        v.into_iter()
            .zip(&flip)
            .map(|(x, f)| if *f { -x } else { x })
            .collect()
    };
    match tableau::solve_min(&dual.as_min()).ok()? {
        MinOutcome::Optimal {
            primal,
            dual: shadow,
            objective,
        } => {
            // Shadow prices of the negated (min) dual are minus those of the max dual.
            let x = shadow.into_iter().map(|y| -y).collect();
            Some(MinOutcome::Optimal {
                primal: x,
                dual: unflip(primal),
                objective: -objective,
            })
        }
        MinOutcome::Unbounded { ray, .. } => Some(MinOutcome::Infeasible {
            signed: unflip(ray),
        }),
        MinOutcome::Infeasible { .. } => None,
    }
}

fn dot_dense(a: &[Rational], b: &[Rational]) -> Rational {
    crate::rational::sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Re-checks every identity `out` claims, from the problem data alone.
pub fn verify(lp: &LinearProgram, out: &LpOutcome) -> bool {
    check(lp, out).is_ok()
}

/// Like [`verify`], naming the first identity that fails.
pub fn check(lp: &LinearProgram, out: &LpOutcome) -> std::result::Result<(), String> {
    let n = lp.num_vars();
    let m = lp.num_rows();
    match out {
        LpOutcome::Optimal {
            primal,
            dual,
            objective,
        } => {
            if primal.len() != n || dual.len() != m {
                return Err("certificate has the wrong dimensions".into());
            }
            check_primal_feasible(lp, primal)?;
            if lp.objective_value(primal) != *objective {
                return Err("objective value does not match the primal point".into());
            }
            // Shadow-price signs: for Min a `≥` row has u ≥ 0, for Max u ≤ 0.
            let orient = |rel: Relation| -> i8 {
                let s = match rel {
                    Relation::Ge => 1,
                    Relation::Le => -1,
                    Relation::Eq => 0,
                };
                if lp.sense == Sense::Max {
                    -s
                } else {
                    s
                }
            };
            for (r, (row, u)) in lp.constraints.iter().zip(dual).enumerate() {
                match orient(row.relation) {
                    1 if u.is_negative() => return Err(format!("dual {r} has the wrong sign")),
                    -1 if u.is_positive() => return Err(format!("dual {r} has the wrong sign")),
                    _ => {}
                }
            }
            let mut reduced = lp.objective.clone();
            for (row, u) in lp.constraints.iter().zip(dual) {
                for (j, c) in &row.terms {
                    reduced[*j] -= c * u;
                }
            }
            for (j, d) in reduced.iter().enumerate() {
                let bad = match (lp.signs[j], lp.sense) {
                    (VarSign::Free, _) => !d.is_zero(),
                    (VarSign::NonNegative, Sense::Min) => d.is_negative(),
                    (VarSign::NonNegative, Sense::Max) => d.is_positive(),
                };
                if bad {
                    return Err(format!(
                        "reduced cost of variable {j} violates dual feasibility"
                    ));
                }
            }
            let dual_objective =
                crate::rational::sum(lp.constraints.iter().zip(dual).map(|(row, u)| &row.rhs * u));
            if dual_objective != *objective {
                return Err("dual objective differs from primal objective".into());
            }
            Ok(())
        }
        LpOutcome::Infeasible { farkas } => {
            if farkas.len() != m {
                return Err("Farkas ray has the wrong dimension".into());
            }
            let mut g = vec![Rational::zero(); n];
            let mut delta = Rational::zero();
            for (r, (row, lambda)) in lp.constraints.iter().zip(farkas).enumerate() {
                if row.relation != Relation::Eq && lambda.is_negative() {
                    return Err(format!("Farkas multiplier {r} is negative"));
                }
                let weight = if row.orientation() < 0 {
                    -lambda.clone()
                } else {
                    lambda.clone()
                };
                for (j, c) in &row.terms {
                    g[*j] += c * &weight;
                }
                delta += &row.rhs * &weight;
            }
            for (j, gj) in g.iter().enumerate() {
                let bad = match lp.signs[j] {
                    VarSign::Free => !gj.is_zero(),
                    VarSign::NonNegative => gj.is_positive(),
                };
                if bad {
                    return Err(format!(
                        "aggregated coefficient of variable {j} does not vanish"
                    ));
                }
            }
            if !delta.is_positive() {
                return Err("aggregated right-hand side is not positive".into());
            }
            Ok(())
        }
        LpOutcome::Unbounded { point, ray } => {
            if point.len() != n || ray.len() != n {
                return Err("unbounded certificate has the wrong dimensions".into());
            }
            check_primal_feasible(lp, point)?;
            for (j, d) in ray.iter().enumerate() {
                if lp.signs[j] == VarSign::NonNegative && d.is_negative() {
                    return Err(format!("ray leaves the bound of variable {j}"));
                }
            }
            for (r, row) in lp.constraints.iter().enumerate() {
                let ad = row.lhs(ray);
                let ok = match row.relation {
                    Relation::Le => !ad.is_positive(),
                    Relation::Ge => !ad.is_negative(),
                    Relation::Eq => ad.is_zero(),
                };
                if !ok {
                    return Err(format!("ray leaves row {r}"));
                }
            }
            let gain = lp.objective_value(ray);
            let improving = match lp.sense {
                Sense::Max => gain.is_positive(),
                Sense::Min => gain.is_negative(),
            };
            if improving {
                Ok(())
            } else {
                Err("ray does not improve the objective".into())
            }
        }
    }
}

fn check_primal_feasible(lp: &LinearProgram, x: &[Rational]) -> std::result::Result<(), String> {
    for (j, v) in x.iter().enumerate() {
        if lp.signs[j] == VarSign::NonNegative && v.is_negative() {
            return Err(format!("variable {j} is negative"));
        }
    }
    for (r, row) in lp.constraints.iter().enumerate() {
        let ax = row.lhs(x);
        let ok = match row.relation {
            Relation::Le => ax <= row.rhs,
            Relation::Ge => ax >= row.rhs,
            Relation::Eq => ax == row.rhs,
        };
        if !ok {
            return Err(format!("row {r} is violated"));
        }
    }
    Ok(())
}
