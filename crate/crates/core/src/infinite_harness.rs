//! Truncation ladders and centered-system probes for the two games over ℕ.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::core_solver::{
    balanced_violation_search, solve_core, BalancedCertificate, CoreDecision,
};
use crate::error::{Error, Result};
use crate::exact_lp::{self, LinearProgram, LpStatus, Relation, Sense, VarSign};
use crate::game_model::{Example1, Example2, GameRule, RestrictedGame, Valuation};
use crate::rational::{self, frac, int, Rational};
use crate::set_algebra::{Coalition, PlayerUniverse, SetFamily};
use crate::witness_builder::{witness_pipeline, PipelineOutcome};

/// Which coalitions constrain each stage of the first ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderPool {
    /// `N`, `{1}`, `ℕ\{1}` and the pairs `{1,k}`.
    Lean,
    /// Additionally every singleton `{k}` and its complement `ℕ\{k}`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Warm,
    Cold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderStage {
    pub n: u32,
    /// `min μ({1, …, n})` over the stage constraints.
    #[serde(serialize_with = "rational::serialize_opt")]
    pub forced_bound: Option<Rational>,
    pub status: LpStatus,
    pub route: Route,
    pub bound_f64: Option<f64>,
    /// `ln(n + 1)`, printed for comparison only.
    pub ln_n_plus_1: f64,
}

/// `H_{2^k} ≥ 1 + k/2`, checked exactly on the ladder's own bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicCertificate {
    /// Largest `k` with `2^k` among the computed stages.
    pub k_max: u32,
    /// Every dyadic block `Σ_{2^{j-1} < i ≤ 2^j} 1/i` for `j ≤ k_max` is at least 1/2.
    pub blocks_hold: bool,
    /// `forced_bound(2^k) ≥ 1 + k/2` for every `k ≤ k_max`.
    pub stages_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conclusion {
    DivergesUnbounded {
        dyadic: DyadicCertificate,
    },
    Stable {
        #[serde(serialize_with = "rational::serialize")]
        bound: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderReport {
    pub pool: LadderPool,
    pub stages: Vec<LadderStage>,
    pub monotone: bool,
    pub conclusion: Conclusion,
}

impl LadderReport {
    pub fn bound(&self, n: u32) -> Option<&Rational> {
        self.stages
            .iter()
            .find(|s| s.n == n)
            .and_then(|s| s.forced_bound.as_ref())
    }

    /// First computed stage whose forced bound exceeds `r`.
    pub fn first_stage_exceeding(&self, r: &Rational) -> Option<u32> {
        self.stages
            .iter()
            .find(|s| s.forced_bound.as_ref().is_some_and(|b| b > r))
            .map(|s| s.n)
    }
}

/// The stage `n = 2^k` with the least `k` such that `1 + k/2 > r`; the
/// dyadic bound puts every later stage above `r`.
pub fn dyadic_stage_exceeding(r: &Rational) -> u64 {
    let mut k = 0u32;
    while int(1) + frac(i64::from(k), 2) <= *r {
        k += 1;
    }
    1u64 << k.min(63)
}

/// Stage `n` of the first ladder: variables are the masses of `{1}, …, {n}`
/// and of `ℕ\{1, …, n}`; rows come from `rule` on the chosen pool.
fn ladder_program(rule: &dyn Valuation, n: u32, pool: LadderPool) -> Result<LinearProgram> {
    let u = PlayerUniverse::Naturals;
    let mut sets = vec![
        Coalition::grand(u),
        Coalition::singleton(u, 1)?,
        Coalition::cofinite(u, [1])?,
    ];
    for k in 2..=n {
        sets.push(Coalition::explicit(u, [1, k])?);
        if pool == LadderPool::Full {
            sets.push(Coalition::singleton(u, k)?);
            sets.push(Coalition::cofinite(u, [k])?);
        }
    }
    let vars = n as usize + 1;
    let reps: Vec<u32> = (1..=n + 1).collect();
    let mut objective = vec![Rational::one(); vars];
    objective[n as usize] = Rational::zero();
    let mut lp = LinearProgram::new(Sense::Min, objective, vec![VarSign::Free; vars])?;
    for (i, s) in sets.iter().enumerate() {
        let terms = reps
            .iter()
            .enumerate()
            .filter(|(_, p)| s.contains(**p))
            .map(|(j, _)| (j, Rational::one()));
        let relation = if i == 0 { Relation::Eq } else { Relation::Ge };
        lp.add_constraint(terms, relation, rule.value(s)?)?;
    }
    Ok(lp)
}

fn pair_row(k: u32, pool: LadderPool) -> usize {
    match pool {
        LadderPool::Lean => k as usize + 1,
        LadderPool::Full => 3 + 3 * (k as usize - 2),
    }
}

/// Minimises `μ({1, …, n})` over the stage constraints for `n = 1, …, n_max`,
/// each stage warm-started from the previous stage's active rows.
pub fn example1_ladder(n_max: u32, pool: LadderPool) -> Result<LadderReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut stages = Vec::with_capacity(n_max as usize);
    let mut active: Vec<usize> = vec![1];
    for n in 1..=n_max {
        let lp = ladder_program(&Example1, n, pool)?;
        let mut hint = active.clone();
        if n >= 2 {
            hint.push(pair_row(n, pool));
        }
        let warm = exact_lp::solve_warm(&lp, &hint)?;
        let route = match &warm.active_set {
            Some(set) => {
                active = set.clone();
                Route::Warm
            }
            None => Route::Cold,
        };
        let status = warm.outcome.status();
        let forced_bound = warm.outcome.objective().cloned();
        stages.push(LadderStage {
            n,
            bound_f64: forced_bound.as_ref().map(rational::to_f64),
            forced_bound,
            status,
            route,
            ln_n_plus_1: (f64::from(n) + 1.0).ln(),
        });
    }

    let bounds: Option<Vec<&Rational>> = stages.iter().map(|s| s.forced_bound.as_ref()).collect();
    let monotone = bounds
        .as_ref()
        .is_some_and(|b| b.windows(2).all(|w| w[0] <= w[1]));
    let conclusion = match &bounds {
        Some(b) if monotone => {
            let k_max = 31 - n_max.leading_zeros();
            let dyadic = dyadic_certificate(k_max, |n| b[n as usize - 1]);
            if dyadic.blocks_hold && dyadic.stages_hold && k_max >= 1 {
                Conclusion::DivergesUnbounded { dyadic }
            } else {
                Conclusion::Stable {
                    bound: b[b.len() - 1].clone(),
                }
            }
        }
        Some(b) => Conclusion::Stable {
            bound: b[b.len() - 1].clone(),
        },
        None => Conclusion::Stable {
            bound: Rational::zero(),
        },
    };
    Ok(LadderReport {
        pool,
        stages,
        monotone,
        conclusion,
    })
}

fn dyadic_certificate<'a>(k_max: u32, bound_at: impl Fn(u32) -> &'a Rational) -> DyadicCertificate {
    let half = frac(1, 2);
    let blocks_hold = (1..=k_max).all(|j| {
        let lo = 1u32 << (j - 1);
        let block = crate::rational::sum((lo + 1..=2 * lo).map(|i| frac(1, i64::from(i))));
        block >= half
    });
    let stages_hold = (0..=k_max).all(|k| *bound_at(1 << k) >= int(1) + frac(i64::from(k), 2));
    DyadicCertificate {
        k_max,
        blocks_hold,
        stages_hold,
    }
}

/// Witness that `rule` is unbounded below: `T = {1, …, m}` with
/// `v(ℕ\T) < bound`.
pub fn unbounded_below_witness(rule: &dyn Valuation, bound: &Rational) -> Result<(u32, Rational)> {
    // -H_m < bound once 1 + k/2 > -bound with m = 2^k.
    let m = dyadic_stage_exceeding(&-bound.clone());
    let m =
        u32::try_from(m).map_err(|_| Error::InvalidArgument("bound too far below zero".into()))?;
    let s = Coalition::cofinite(PlayerUniverse::Naturals, 1..=m)?;
    let v = rule.value(&s)?;
    if v < *bound {
        Ok((m, v))
    } else {
        Err(Error::Verification(format!(
            "v(ℕ\\{{1..{m}}}) is not below the bound"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictedStage {
    pub n: u32,
    pub feasible: SetFamily,
    pub decision: CoreDecision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub message: String,
    /// The balanced collection `{1}, ℕ\{1}` with value sum 2 against `v′(N) = 1`.
    pub violation: Option<BalancedCertificate>,
    /// Whether the last stage's pool without `{1}` admits a violation.
    pub violation_without_singleton: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictedLadderReport {
    pub stages: Vec<RestrictedStage>,
    pub all_empty: bool,
    pub discrepancy: Discrepancy,
}

/// Solves the restricted core of the second game on its members within
/// `{1, …, n}` (plus `ℕ\{1}` and `ℕ`) for `n = 1, …, n_max`.
pub fn example2_ladder(n_max: u32) -> Result<RestrictedLadderReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let rule = Example2;
    let u = PlayerUniverse::Naturals;
    let mut stages = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let feasible = rule.feasible_within(n).expect("partial rule");
        let mut table = Vec::new();
        for s in feasible.iter().filter(|s| !s.is_empty()) {
            table.push((s.clone(), rule.value(s)?));
        }
        let rg = RestrictedGame::new(u, Some(feasible.clone()), table, rule.grand_value()?)?;
        let decision = solve_core(&rg)?;
        stages.push(RestrictedStage {
            n,
            feasible,
            decision,
        });
    }
    let all_empty = stages.iter().all(|s| !s.decision.is_nonempty());

    let literal = SetFamily::new(
        u,
        [Coalition::singleton(u, 1)?, Coalition::cofinite(u, [1])?],
    )?;
    let violation = balanced_violation_search(&rule, &literal)?.violation;
    let last = rule.feasible_within(n_max).expect("partial rule");
    let without = SetFamily::new(
        u,
        last.iter()
            .filter(|s| s.members() != [1] || s.is_cofinite())
            .cloned(),
    )?;
    let violation_without_singleton = balanced_violation_search(&rule, &without)?
        .violation
        .is_some();
    let message = match &violation {
        Some(c) => format!(
            "the feasible family contains {{1}} (the i = 1 pair); {{1}} and ℕ\\{{1}} form a balanced collection with value sum {} > v′(N) = 1, so the game is not balanced on its feasible family as stated",
            rational::format(&c.value_sum)
        ),
        None => "no violation found on the literal pool".into(),
    };
    Ok(RestrictedLadderReport {
        stages,
        all_empty,
        discrepancy: Discrepancy {
            message,
            violation,
            violation_without_singleton,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeEntry {
    pub family: SetFamily,
    pub outcome: PipelineOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenteredProbe {
    pub entries: Vec<ProbeEntry>,
    /// Every family admits a measure meeting its constraints within radius `R`.
    pub all_nonempty: bool,
}

/// Runs the witness pipeline on each family.
pub fn centered_probe(
    v: &dyn Valuation,
    families: &[SetFamily],
    lower_bound: Option<&Rational>,
    cap: usize,
) -> Result<CenteredProbe> {
    let mut entries = Vec::with_capacity(families.len());
    for family in families {
        let outcome = witness_pipeline(v, family, lower_bound, cap)?;
        entries.push(ProbeEntry {
            family: family.clone(),
            outcome,
        });
    }
    let all_nonempty = entries.iter().all(|e| match &e.outcome {
        PipelineOutcome::Measure { report, .. } => report.passed(),
        PipelineOutcome::Empty { .. } => false,
    });
    Ok(CenteredProbe {
        entries,
        all_nonempty,
    })
}

/// Families `{{1}, …, {n}}` for `n = 1, …, n_max`.
pub fn prefix_singleton_families(n_max: u32) -> Result<Vec<SetFamily>> {
    let u = PlayerUniverse::Naturals;
    (1..=n_max)
        .map(|n| {
            SetFamily::new(
                u,
                (1..=n).map(|k| Coalition::singleton(u, k).expect("positive")),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_algebra::DEFAULT_HULL_CAP;

    #[test]
    fn first_stages() {
        let report = example1_ladder(3, LadderPool::Lean).unwrap();
        assert_eq!(report.bound(1), Some(&int(1)));
        assert_eq!(report.bound(2), Some(&frac(3, 2)));
        assert_eq!(report.bound(3), Some(&frac(11, 6)));
        assert!(report.monotone);
        assert!(report.stages.iter().all(|s| s.route == Route::Warm));
    }

    #[test]
    fn full_pool_agrees() {
        let lean = example1_ladder(6, LadderPool::Lean).unwrap();
        let full = example1_ladder(6, LadderPool::Full).unwrap();
        for n in 1..=6 {
            assert_eq!(lean.bound(n), full.bound(n));
        }
    }

    #[test]
    fn divergence_conclusion() {
        let report = example1_ladder(16, LadderPool::Lean).unwrap();
        let Conclusion::DivergesUnbounded { dyadic } = &report.conclusion else {
            panic!("expected divergence")
        };
        assert_eq!(dyadic.k_max, 4);
        assert_eq!(report.first_stage_exceeding(&int(3)), Some(11));
        assert_eq!(dyadic_stage_exceeding(&int(6)), 1 << 11);
        assert_eq!(dyadic_stage_exceeding(&frac(11, 2)), 1 << 10);
    }

    #[test]
    fn example1_unbounded_below() {
        let (m, v) = unbounded_below_witness(&Example1, &int(-3)).unwrap();
        assert!(v < int(-3));
        assert_eq!(m, 1 << 5);
    }

    #[test]
    fn restricted_ladder() {
        let report = example2_ladder(4).unwrap();
        assert!(report.all_empty);
        let first = report.stages[0].decision.certificate().unwrap();
        assert_eq!(first.value_sum, int(2));
        assert!(report.discrepancy.violation.is_some());
        assert!(!report.discrepancy.violation_without_singleton);
    }

    #[test]
    fn example1_probe() {
        let families = prefix_singleton_families(4).unwrap();
        let probe = centered_probe(&Example1, &families, None, DEFAULT_HULL_CAP).unwrap();
        assert!(probe.all_nonempty);
        let PipelineOutcome::Measure { report, .. } = &probe.entries[3].outcome else {
            panic!()
        };
        assert_eq!(report.radius, frac(25, 6));
    }
}
