//! Core and balancedness decisions with exact certificates.
//!
//! Every balancing identity `Σ λ_p χ_{S_p} = χ_T` is imposed region-wise:
//! the coalitions involved cut `N` into finitely many regions, and the
//! identity holds pointwise iff it holds on each region. Certificates are
//! re-verified against the game before they are returned.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_lp::{self, LinearProgram, LpOutcome, Relation, Sense, VarSign};
use crate::game_model::{shift_epsilon, Game, RestrictedGame, TuGame, Valuation};
use crate::rational::{self, Rational};
use crate::set_algebra::{field_hull, regions, Coalition, PlayerUniverse, SetFamily};

/// A finitely supported payoff `a`, read as the additive set function
/// `S ↦ Σ_{i∈S} a_i`. Over a finite universe every player has an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffVector {
    universe: PlayerUniverse,
    entries: BTreeMap<u32, Rational>,
}

impl PayoffVector {
    pub fn new(universe: PlayerUniverse, entries: BTreeMap<u32, Rational>) -> Self {
        let mut entries = entries;
        if let PlayerUniverse::Finite(n) = universe {
            for p in 1..=n {
                entries.entry(p).or_insert_with(Rational::zero);
            }
        }
        PayoffVector { universe, entries }
    }

    pub fn universe(&self) -> PlayerUniverse {
        self.universe
    }

    pub fn entries(&self) -> &BTreeMap<u32, Rational> {
        &self.entries
    }

    pub fn get(&self, player: u32) -> Rational {
        self.entries
            .get(&player)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `Σ_{i∈S} a_i`.
    pub fn measure(&self, s: &Coalition) -> Rational {
        self.entries
            .iter()
            .filter(|(p, _)| s.contains(**p))
            .fold(Rational::zero(), |acc, (_, a)| acc + a)
    }
}

impl Serialize for PayoffVector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<u32, String> = self
            .entries
            .iter()
            .map(|(p, a)| (*p, rational::format(a)))
            .collect();
        map.serialize(serializer)
    }
}

/// Coalitions with non-negative weights whose weighted indicator functions
/// sum to the indicator of `covered`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancedCertificate {
    pub collection: Vec<Coalition>,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub weights: Vec<Rational>,
    pub covered: Coalition,
    #[serde(serialize_with = "rational::serialize")]
    pub value_sum: Rational,
}

impl BalancedCertificate {
    /// Checks weights, the balancing identity and the value sum against `v`.
    pub fn verify(&self, v: &dyn Valuation) -> std::result::Result<(), String> {
        self.check(v, true)
    }

    /// As [`verify`](Self::verify), with `Σ λ_S χ_S ≤ χ_covered` in place of
    /// equality.
    pub fn verify_sub(&self, v: &dyn Valuation) -> std::result::Result<(), String> {
        self.check(v, false)
    }

    fn check(&self, v: &dyn Valuation, exact: bool) -> std::result::Result<(), String> {
        if self.collection.len() != self.weights.len() {
            return Err("collection and weights differ in length".into());
        }
        if let Some(w) = self.weights.iter().find(|w| w.is_negative()) {
            return Err(format!("negative weight {}", rational::format(w)));
        }
        let universe = self.covered.universe();
        let mut generators = self.collection.clone();
        generators.push(self.covered.clone());
        for region in regions(universe, &generators) {
            let lhs = self
                .weights
                .iter()
                .zip(&region.signature)
                .filter(|(_, inside)| **inside)
                .fold(Rational::zero(), |acc, (w, _)| acc + w);
            let rhs = if *region.signature.last().expect("covered is a generator") {
                Rational::one()
            } else {
                Rational::zero()
            };
            if lhs > rhs || exact && lhs != rhs {
                return Err(format!("balancing identity fails on region {}", region.set));
            }
        }
        let mut sum = Rational::zero();
        for (s, w) in self.collection.iter().zip(&self.weights) {
            sum += w * v.value(s).map_err(|e| e.to_string())?;
        }
        if sum != self.value_sum {
            return Err("value sum does not match the game".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoreDecision {
    NonEmpty { witness: PayoffVector },
    Empty { certificate: BalancedCertificate },
}

impl CoreDecision {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, CoreDecision::NonEmpty { .. })
    }

    pub fn witness(&self) -> Option<&PayoffVector> {
        match self {
            CoreDecision::NonEmpty { witness } => Some(witness),
            CoreDecision::Empty { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&BalancedCertificate> {
        match self {
            CoreDecision::Empty { certificate } => Some(certificate),
            CoreDecision::NonEmpty { .. } => None,
        }
    }
}

/// Re-checks a decision against the game from scratch.
pub fn verify_core_decision(
    game: &dyn TuGame,
    decision: &CoreDecision,
) -> std::result::Result<(), String> {
    let grand = game.grand_value().map_err(|e| e.to_string())?;
    match decision {
        CoreDecision::NonEmpty { witness } => {
            let n = Coalition::grand(game.universe());
            if witness.measure(&n) != grand {
                return Err("witness is not efficient".into());
            }
            for (s, v) in game.feasible_values() {
                if witness.measure(&s) < v {
                    return Err(format!("witness violates the constraint of {s}"));
                }
            }
            Ok(())
        }
        CoreDecision::Empty { certificate } => {
            certificate.verify(game)?;
            if !certificate.covered.is_grand() {
                return Err("certificate does not cover N".into());
            }
            if certificate.value_sum <= grand {
                return Err("certificate does not exceed v(N)".into());
            }
            Ok(())
        }
    }
}

fn region_reps(regions: &[Coalition]) -> Result<Vec<u32>> {
    regions
        .iter()
        .map(|r| {
            r.least_member()
                .ok_or_else(|| Error::Solver(format!("empty region {r}")))
        })
        .collect()
}

/// Index sets of the regions (given by representatives) inside each coalition.
fn incidence(sets: &[Coalition], reps: &[u32]) -> Vec<Vec<usize>> {
    sets.iter()
        .map(|s| (0..reps.len()).filter(|&k| s.contains(reps[k])).collect())
        .collect()
}

fn verified(game: &dyn TuGame, decision: CoreDecision) -> Result<CoreDecision> {
    verify_core_decision(game, &decision).map_err(Error::Verification)?;
    Ok(decision)
}

/// Decides whether the core `{a : a(N) = v(N), a(S) ≥ v(S) for feasible S}`
/// is empty, returning a witness or a violated balanced collection.
pub fn solve_core(game: &dyn TuGame) -> Result<CoreDecision> {
    let universe = game.universe();
    let grand = game.grand_value()?;
    let regions = game.regions();
    let reps = region_reps(&regions)?;
    let constrained: Vec<(Coalition, Rational)> = game
        .feasible_values()
        .into_iter()
        .filter(|(s, _)| !s.is_grand())
        .collect();
    let sets: Vec<Coalition> = constrained.iter().map(|(s, _)| s.clone()).collect();
    let inc = incidence(&sets, &reps);

    let k = regions.len();
    let mut lp = LinearProgram::new(
        Sense::Min,
        vec![Rational::zero(); k],
        vec![VarSign::Free; k],
    )?;
    lp.add_constraint(
        (0..k).map(|j| (j, Rational::one())),
        Relation::Eq,
        grand.clone(),
    )?;
    for ((_, v), cols) in constrained.iter().zip(&inc) {
        lp.add_constraint(
            cols.iter().map(|&j| (j, Rational::one())),
            Relation::Ge,
            v.clone(),
        )?;
    }

    let decision = match exact_lp::solve(&lp)? {
        LpOutcome::Optimal { primal, .. } => {
            let entries = reps.iter().zip(primal).map(|(p, a)| (*p, a)).collect();
            CoreDecision::NonEmpty {
                witness: PayoffVector::new(universe, entries),
            }
        }
        LpOutcome::Infeasible { farkas } => {
            // Σ λ_S χ_S = -λ_N χ_N with Σ λ_S v(S) > -λ_N v(N); scale by t = -λ_N.
            let t = -farkas[0].clone();
            if !t.is_positive() {
                return Err(Error::Solver(
                    "Farkas ray does not weigh the grand coalition".into(),
                ));
            }
            let mut collection = Vec::new();
            let mut weights = Vec::new();
            let mut value_sum = Rational::zero();
            for ((s, v), lambda) in constrained.iter().zip(&farkas[1..]) {
                if lambda.is_zero() {
                    continue;
                }
                let w = lambda / &t;
                value_sum += &w * v;
                collection.push(s.clone());
                weights.push(w);
            }
            let certificate = BalancedCertificate {
                collection,
                weights,
                covered: Coalition::grand(universe),
                value_sum,
            };
            CoreDecision::Empty { certificate }
        }
        LpOutcome::Unbounded { .. } => {
            return Err(Error::Solver(
                "feasibility program reported unbounded".into(),
            ))
        }
    };
    verified(game, decision)
}

/// Optimum of a region-wise cover program
/// `max Σ λ_p v(S_p)` over `λ ≥ 0` with `Σ λ_p χ_{S_p} (= or ≤) χ_T`.
fn cover_program(
    universe: PlayerUniverse,
    pool: &[(Coalition, Rational)],
    covered: &Coalition,
    relation: Relation,
) -> Result<SupValue> {
    let mut generators: Vec<Coalition> = pool.iter().map(|(s, _)| s.clone()).collect();
    generators.push(covered.clone());
    let cells: Vec<Coalition> = regions(universe, &generators)
        .into_iter()
        .map(|r| r.set)
        .collect();
    let reps = region_reps(&cells)?;

    let objective = pool.iter().map(|(_, v)| v.clone()).collect();
    let mut lp = LinearProgram::new(
        Sense::Max,
        objective,
        vec![VarSign::NonNegative; pool.len()],
    )?;
    for &rep in &reps {
        let terms = pool
            .iter()
            .enumerate()
            .filter(|(_, (s, _))| s.contains(rep))
            .map(|(j, _)| (j, Rational::one()));
        let rhs = if covered.contains(rep) {
            Rational::one()
        } else {
            Rational::zero()
        };
        lp.add_constraint(terms, relation, rhs)?;
    }
    Ok(match exact_lp::solve(&lp)? {
        LpOutcome::Optimal {
            primal, objective, ..
        } => {
            let mut collection = Vec::new();
            let mut weights = Vec::new();
            for ((s, _), w) in pool.iter().zip(primal) {
                if !w.is_zero() {
                    collection.push(s.clone());
                    weights.push(w);
                }
            }
            let certificate = BalancedCertificate {
                collection,
                weights,
                covered: covered.clone(),
                value_sum: objective.clone(),
            };
            SupValue::Finite {
                value: objective,
                certificate,
            }
        }
        LpOutcome::Infeasible { .. } => SupValue::Infeasible,
        LpOutcome::Unbounded { .. } => SupValue::Unbounded,
    })
}

/// Outcome of a supremum over balancing weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupValue {
    Finite {
        #[serde(serialize_with = "rational::serialize")]
        value: Rational,
        certificate: BalancedCertificate,
    },
    Unbounded,
    /// No admissible weights; the supremum is `−∞`.
    Infeasible,
}

impl SupValue {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            SupValue::Finite { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// `d* = max Σ λ_S v(S)` over balanced collections of feasible coalitions,
/// with an optimal collection. The game is balanced iff `d* ≤ v(N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverValue {
    #[serde(serialize_with = "rational::serialize")]
    pub value: Rational,
    pub certificate: BalancedCertificate,
}

impl CoverValue {
    /// When `d* > v(N)`, an optimal collection rescaled to avoid `N`, which
    /// then exceeds `v(N)` on its own.
    pub fn violation(&self, grand: &Rational) -> Option<BalancedCertificate> {
        if self.value <= *grand {
            return None;
        }
        let cert = &self.certificate;
        let lambda_n = cert
            .collection
            .iter()
            .zip(&cert.weights)
            .find(|(s, _)| s.is_grand())
            .map(|(_, w)| w.clone())
            .unwrap_or_else(Rational::zero);
        let rest = Rational::one() - &lambda_n;
        let mut collection = Vec::new();
        let mut weights = Vec::new();
        for (s, w) in cert.collection.iter().zip(&cert.weights) {
            if !s.is_grand() {
                collection.push(s.clone());
                weights.push(w / &rest);
            }
        }
        let value_sum = (&self.value - &lambda_n * grand) / &rest;
        Some(BalancedCertificate {
            collection,
            weights,
            covered: cert.covered.clone(),
            value_sum,
        })
    }
}

pub fn balanced_cover_value(game: &dyn TuGame) -> Result<CoverValue> {
    let universe = game.universe();
    let pool = game.feasible_values();
    match cover_program(universe, &pool, &Coalition::grand(universe), Relation::Eq)? {
        SupValue::Finite { value, certificate } => {
            certificate.verify(game).map_err(Error::Verification)?;
            Ok(CoverValue { value, certificate })
        }
        _ => Err(Error::Solver(
            "cover program with N available must be feasible and bounded".into(),
        )),
    }
}

fn sup_balanced(game: &dyn TuGame, s: &Coalition, relation: Relation) -> Result<SupValue> {
    let universe = game.universe();
    if s.universe() != universe {
        return Err(Error::UniverseMismatch {
            left: universe.to_string(),
            right: s.universe().to_string(),
        });
    }
    let pool = game.feasible_values();
    if !s.is_empty() && !pool.iter().any(|(t, _)| t == s) {
        return Err(Error::Infeasible(s.to_string()));
    }
    let out = cover_program(universe, &pool, s, relation)?;
    if let SupValue::Finite { certificate, .. } = &out {
        if relation == Relation::Eq {
            certificate.verify(game).map_err(Error::Verification)?;
        }
    }
    Ok(out)
}

/// `sup Σ a_i v(A_i)` over `a ≥ 0` with `Σ a_i χ_{A_i} = χ_S`.
pub fn sup_balanced_eq(game: &dyn TuGame, s: &Coalition) -> Result<SupValue> {
    sup_balanced(game, s, Relation::Eq)
}

/// `sup Σ a_i v(A_i)` over `a ≥ 0` with `Σ a_i χ_{A_i} ≤ χ_S`.
pub fn sup_balanced_ineq(game: &dyn TuGame, s: &Coalition) -> Result<SupValue> {
    sup_balanced(game, s, Relation::Le)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoundedBalanced {
    /// A balanced extension to the field hull, with a core element of it.
    Extension {
        #[serde(skip)]
        game: Game,
        witness: PayoffVector,
    },
    Refutation {
        certificate: BalancedCertificate,
    },
}

/// Decides whether `v′` extends to a bounded below balanced game on the
/// field hull of `A′`, constructively.
pub fn bounded_balanced_check(rg: &RestrictedGame, cap: usize) -> Result<BoundedBalanced> {
    let hull = field_hull(rg.feasible(), cap)?;
    match solve_core(rg)? {
        CoreDecision::Empty { certificate } => Ok(BoundedBalanced::Refutation { certificate }),
        CoreDecision::NonEmpty { witness } => {
            let mut table = Vec::new();
            for s in hull.members().iter().filter(|s| !s.is_empty()) {
                let v = match rg.table().get(s) {
                    Some(v) => v.clone(),
                    None => witness.measure(s),
                };
                table.push((s.clone(), v));
            }
            let game = Game::on_field(hull, table, rg.grand_value()?, None)?;
            verify_core_decision(
                &game,
                &CoreDecision::NonEmpty {
                    witness: witness.clone(),
                },
            )
            .map_err(Error::Verification)?;
            Ok(BoundedBalanced::Extension { game, witness })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsilonProbe {
    #[serde(serialize_with = "rational::serialize")]
    pub eps: Rational,
    pub core_nonempty: bool,
    /// What `d* ≤ v(N) + ε` predicts.
    pub predicted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsilonReport {
    #[serde(serialize_with = "rational::serialize")]
    pub d_star: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub grand_value: Rational,
    /// `d* ≤ v(N)`.
    pub balanced: bool,
    pub core_nonempty: bool,
    pub probes: Vec<EpsilonProbe>,
    pub all_probed_nonempty: bool,
    /// All of the above agree with each other.
    pub consistent: bool,
}

/// Solves the core of every `v_ε` and compares with the cover value.
pub fn epsilon_equivalence(game: &Game, eps_list: &[Rational]) -> Result<EpsilonReport> {
    let grand = game.grand_value()?;
    let d_star = balanced_cover_value(game)?.value;
    let balanced = d_star <= grand;
    let core_nonempty = solve_core(game)?.is_nonempty();
    let mut probes = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        let shifted = shift_epsilon(game, eps)?;
        let nonempty = solve_core(&shifted)?.is_nonempty();
        probes.push(EpsilonProbe {
            eps: eps.clone(),
            core_nonempty: nonempty,
            predicted: d_star <= &grand + eps,
        });
    }
    let all_probed_nonempty = probes.iter().all(|p| p.core_nonempty);
    let consistent =
        balanced == core_nonempty && probes.iter().all(|p| p.core_nonempty == p.predicted);
    Ok(EpsilonReport {
        d_star,
        grand_value: grand,
        balanced,
        core_nonempty,
        probes,
        all_probed_nonempty,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationSearch {
    #[serde(serialize_with = "rational::serialize")]
    pub optimum: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub grand_value: Rational,
    pub violation: Option<BalancedCertificate>,
}

/// Maximises `Σ λ_p v(S_p)` over balanced collections drawn from `pool`
/// (with `N` added) and reports a violating collection if one exists.
pub fn balanced_violation_search(v: &dyn Valuation, pool: &SetFamily) -> Result<ViolationSearch> {
    let universe = v.universe();
    if pool.universe() != universe {
        return Err(Error::UniverseMismatch {
            left: universe.to_string(),
            right: pool.universe().to_string(),
        });
    }
    let grand_set = Coalition::grand(universe);
    let family = pool.with(grand_set.clone())?;
    let mut entries = Vec::with_capacity(family.len());
    for s in family.iter().filter(|s| !s.is_empty()) {
        entries.push((s.clone(), v.value(s)?));
    }
    let grand = v.grand_value()?;
    let SupValue::Finite { value, certificate } =
        cover_program(universe, &entries, &grand_set, Relation::Eq)?
    else {
        return Err(Error::Solver(
            "cover program with N available must be feasible and bounded".into(),
        ));
    };
    certificate.verify(v).map_err(Error::Verification)?;
    let cover = CoverValue { value, certificate };
    let violation = cover.violation(&grand);
    if let Some(c) = &violation {
        c.verify(v).map_err(Error::Verification)?;
        if c.value_sum <= grand {
            return Err(Error::Verification(
                "rescaled collection does not exceed v(N)".into(),
            ));
        }
    }
    Ok(ViolationSearch {
        optimum: cover.value,
        grand_value: grand,
        violation,
    })
}
