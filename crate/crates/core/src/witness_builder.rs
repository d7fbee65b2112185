//! Finite-stage core elements for games on infinite fields.
//!
//! Given picked coalitions, the pipeline builds the finite subfield they
//! generate, the quotient game on its atoms, a core point of the quotient,
//! and from it a measure `Σ a_k δ_{x_k}` with one point mass per atom. The
//! measure satisfies the picked constraints and has ba-norm at most
//! `v(N) − 2L` whenever the game is balanced and bounded below by `L`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::core_solver::{solve_core, BalancedCertificate, CoreDecision};
use crate::error::{Error, Result};
use crate::game_model::{BoundSource, Game, Valuation};
use crate::rational::{self, Rational};
use crate::set_algebra::{field_hull, Coalition, FieldOfSets, PlayerUniverse, SetFamily};

/// The field generated by `picked` (with ∅ and `N`).
pub fn build_subfield(picked: &SetFamily, cap: usize) -> Result<FieldOfSets> {
    field_hull(picked, cap)
}

/// The game `S′ ↦ v(∪_{k∈S′} atom_k)` on the atom indices `{1, …, n′}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGame {
    pub field: FieldOfSets,
    pub game: Game,
}

impl QuotientGame {
    pub fn atoms(&self) -> &[Coalition] {
        self.field.atoms()
    }

    /// The union of the atoms indexed by a quotient coalition.
    pub fn lift(&self, s: &Coalition) -> Coalition {
        let mask = s.members().iter().fold(0u64, |m, &k| m | 1 << (k - 1));
        self.field.compose(mask)
    }
}

pub fn quotient(v: &dyn Valuation, field: &FieldOfSets) -> Result<QuotientGame> {
    let atoms = field.atoms().len();
    if atoms > 30 {
        return Err(Error::InvalidArgument(format!(
            "quotient over {atoms} atoms is too large"
        )));
    }
    let n = atoms as u32;
    let mut table = Vec::with_capacity((1usize << atoms) - 1);
    for mask in 1..1u64 << n {
        let lifted = field.compose(mask);
        table.push((Coalition::from_mask(n, mask), v.value(&lifted)?));
    }
    let grand = v.grand_value()?;
    let game = Game::explicit(PlayerUniverse::Finite(n), table, grand, None)?;
    Ok(QuotientGame {
        field: field.clone(),
        game,
    })
}

/// A finitely supported measure `Σ w_x δ_x`, evaluated on a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    support: Vec<(u32, Rational)>,
    field: FieldOfSets,
}

#[derive(Serialize)]
struct PointMass<'a> {
    point: u32,
    #[serde(serialize_with = "rational::serialize")]
    weight: &'a Rational,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let masses: Vec<PointMass<'_>> = self
            .support
            .iter()
            .map(|(p, w)| PointMass {
                point: *p,
                weight: w,
            })
            .collect();
        masses.serialize(serializer)
    }
}

impl DiscreteMeasure {
    /// Points must be distinct players of the field's universe.
    pub fn new(support: Vec<(u32, Rational)>, field: FieldOfSets) -> Result<Self> {
        let mut points: Vec<u32> = support.iter().map(|(p, _)| *p).collect();
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "measure points must be distinct".into(),
            ));
        }
        for &p in &points {
            Coalition::singleton(field.universe(), p)?;
        }
        Ok(DiscreteMeasure { support, field })
    }

    pub fn support(&self) -> &[(u32, Rational)] {
        &self.support
    }

    pub fn field(&self) -> &FieldOfSets {
        &self.field
    }

    /// `μ(S) = Σ_{x∈S} w_x`.
    pub fn measure(&self, s: &Coalition) -> Rational {
        self.support
            .iter()
            .filter(|(p, _)| s.contains(*p))
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }
}

/// Sup of `Σ_q |μ(T_q)|` over finite partitions of `N` in the field,
/// attained at the atom partition.
pub fn ba_norm(m: &DiscreteMeasure) -> Rational {
    m.field
        .atoms()
        .iter()
        .fold(Rational::zero(), |acc, atom| acc + m.measure(atom).abs())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DiracOutcome {
    Measure {
        measure: DiscreteMeasure,
    },
    /// The quotient core is empty; the violated collection, lifted to `N`.
    Lifted {
        certificate: BalancedCertificate,
    },
}

/// One point mass at the least player of every atom, weighted by a core
/// point of the quotient; or the quotient's violation lifted back.
pub fn dirac_witness(q: &QuotientGame) -> Result<DiracOutcome> {
    match solve_core(&q.game)? {
        CoreDecision::NonEmpty { witness } => {
            let mut support = Vec::with_capacity(q.atoms().len());
            for (k, atom) in q.atoms().iter().enumerate() {
                let x = atom
                    .least_member()
                    .ok_or_else(|| Error::Solver("empty atom".into()))?;
                support.push((x, witness.get(k as u32 + 1)));
            }
            Ok(DiracOutcome::Measure {
                measure: DiscreteMeasure::new(support, q.field.clone())?,
            })
        }
        CoreDecision::Empty { certificate } => {
            let collection = certificate.collection.iter().map(|s| q.lift(s)).collect();
            let covered = Coalition::grand(q.field.universe());
            Ok(DiracOutcome::Lifted {
                certificate: BalancedCertificate {
                    collection,
                    weights: certificate.weights,
                    covered,
                    value_sum: certificate.value_sum,
                },
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub grand_ok: bool,
    /// Picked coalitions with `μ(S) < v(S)`.
    pub violated: Vec<Coalition>,
    #[serde(serialize_with = "rational::serialize")]
    pub norm: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub lower_bound: Rational,
    pub lower_bound_source: BoundSource,
    /// `R = v(N) − 2L`.
    #[serde(serialize_with = "rational::serialize")]
    pub radius: Rational,
    pub norm_ok: bool,
    /// `v(N) < 2L`, so no bounded core element can exist.
    pub a_priori_empty: bool,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.grand_ok && self.violated.is_empty() && self.norm_ok
    }
}

/// Checks `μ(N) = v(N)`, `μ(S) ≥ v(S)` for picked `S`, and `‖μ‖ ≤ v(N) − 2L`.
/// Without a declared `L` the minimum of `v` over the measure's field is used.
pub fn verify_witness(
    m: &DiscreteMeasure,
    v: &dyn Valuation,
    picked: &SetFamily,
    lower_bound: Option<&Rational>,
) -> Result<WitnessReport> {
    let universe = v.universe();
    let grand = v.grand_value()?;
    let grand_ok = m.measure(&Coalition::grand(universe)) == grand;
    let mut violated = Vec::new();
    for s in picked.iter() {
        if m.measure(s) < v.value(s)? {
            violated.push(s.clone());
        }
    }
    let (lower_bound, lower_bound_source) = match lower_bound {
        Some(l) => (l.clone(), BoundSource::Declared),
        None => {
            let mut min = Rational::zero();
            for s in m.field.members().iter() {
                let value = v.value(s)?;
                if value < min {
                    min = value;
                }
            }
            (min, BoundSource::Inferred)
        }
    };
    let radius = &grand - &lower_bound * Rational::from_integer(2.into());
    let norm = ba_norm(m);
    let norm_ok = norm <= radius;
    let a_priori_empty = radius.is_negative();
    Ok(WitnessReport {
        grand_ok,
        violated,
        norm,
        lower_bound,
        lower_bound_source,
        radius,
        norm_ok,
        a_priori_empty,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PipelineOutcome {
    Measure {
        measure: DiscreteMeasure,
        report: WitnessReport,
    },
    Empty {
        certificate: BalancedCertificate,
    },
}

/// Subfield, quotient, Dirac witness and verification in one call.
pub fn witness_pipeline(
    v: &dyn Valuation,
    picked: &SetFamily,
    lower_bound: Option<&Rational>,
    cap: usize,
) -> Result<PipelineOutcome> {
    let field = build_subfield(picked, cap)?;
    let q = quotient(v, &field)?;
    match dirac_witness(&q)? {
        DiracOutcome::Measure { measure } => {
            let report = verify_witness(&measure, v, picked, lower_bound)?;
            Ok(PipelineOutcome::Measure { measure, report })
        }
        DiracOutcome::Lifted { certificate } => {
            certificate.verify(v).map_err(Error::Verification)?;
            Ok(PipelineOutcome::Empty { certificate })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_model::{Example1, TuGame};
    use crate::rational::{frac, int};
    use crate::set_algebra::DEFAULT_HULL_CAP;

    fn f(n: u32, players: &[u32]) -> Coalition {
        Coalition::explicit(PlayerUniverse::Finite(n), players.iter().copied()).unwrap()
    }

    fn nat(players: &[u32]) -> Coalition {
        Coalition::explicit(PlayerUniverse::Naturals, players.iter().copied()).unwrap()
    }

    fn cof(excluded: &[u32]) -> Coalition {
        Coalition::cofinite(PlayerUniverse::Naturals, excluded.iter().copied()).unwrap()
    }

    fn four_player() -> (Game, SetFamily) {
        let u = PlayerUniverse::Finite(4);
        let table = vec![(f(4, &[1, 2]), int(1)), (f(4, &[3, 4]), int(1))];
        let g = Game::explicit(u, table, int(2), Some(int(0))).unwrap();
        let picked = SetFamily::new(u, [f(4, &[1, 2]), f(4, &[3, 4])]).unwrap();
        (g, picked)
    }

    #[test]
    fn subfield_examples() {
        let (_, picked) = four_player();
        let field = build_subfield(&picked, DEFAULT_HULL_CAP).unwrap();
        assert_eq!(field.members().len(), 4);
        assert_eq!(field.atoms(), &[f(4, &[1, 2]), f(4, &[3, 4])]);

        let one = SetFamily::new(PlayerUniverse::Naturals, [nat(&[1])]).unwrap();
        let field = build_subfield(&one, DEFAULT_HULL_CAP).unwrap();
        assert_eq!(
            field.members().sets(),
            &[nat(&[]), nat(&[1]), cof(&[]), cof(&[1])]
        );

        let two = SetFamily::new(PlayerUniverse::Naturals, [nat(&[1]), nat(&[1, 2])]).unwrap();
        let field = build_subfield(&two, DEFAULT_HULL_CAP).unwrap();
        assert_eq!(field.atoms(), &[nat(&[1]), nat(&[2]), cof(&[1, 2])]);
    }

    #[test]
    fn example1_quotient_and_witness() {
        let picked = SetFamily::new(PlayerUniverse::Naturals, [nat(&[1]), cof(&[1])]).unwrap();
        let field = build_subfield(&picked, DEFAULT_HULL_CAP).unwrap();
        let q = quotient(&Example1, &field).unwrap();
        assert_eq!(q.game.value(&f(2, &[1])).unwrap(), int(1));
        assert_eq!(q.game.value(&f(2, &[2])).unwrap(), int(-1));
        assert_eq!(q.game.grand_value().unwrap(), int(0));

        let DiracOutcome::Measure { measure } = dirac_witness(&q).unwrap() else {
            panic!("expected a measure")
        };
        assert_eq!(measure.support(), &[(1, int(1)), (2, int(-1))]);
        assert_eq!(measure.measure(&cof(&[1])), int(-1));

        let report = verify_witness(&measure, &Example1, &picked, None).unwrap();
        assert!(report.passed());
        assert_eq!(
            (report.norm.clone(), report.radius.clone()),
            (int(2), int(2))
        );
        assert_eq!(report.lower_bound, int(-1));
    }

    #[test]
    fn four_player_pipeline() {
        let (g, picked) = four_player();
        let field = build_subfield(&picked, DEFAULT_HULL_CAP).unwrap();
        let q = quotient(&g, &field).unwrap();
        assert_eq!(q.game.value(&f(2, &[1])).unwrap(), int(1));
        assert_eq!(q.game.value(&f(2, &[2])).unwrap(), int(1));
        let DiracOutcome::Measure { measure } = dirac_witness(&q).unwrap() else {
            panic!()
        };
        assert_eq!(measure.support(), &[(1, int(1)), (3, int(1))]);
        let report = verify_witness(&measure, &g, &picked, Some(g.lower_bound())).unwrap();
        assert!(report.passed());
        assert_eq!(
            (report.norm.clone(), report.radius.clone()),
            (int(2), int(2))
        );
    }

    #[test]
    fn trivial_quotient() {
        let (g, _) = four_player();
        let field = build_subfield(
            &SetFamily::empty(PlayerUniverse::Finite(4)),
            DEFAULT_HULL_CAP,
        )
        .unwrap();
        let q = quotient(&g, &field).unwrap();
        assert_eq!(q.game.feasible_values(), vec![(f(1, &[1]), int(2))]);
    }

    #[test]
    fn majority_lifts_certificate() {
        let u = PlayerUniverse::Finite(3);
        let table = vec![
            (f(3, &[1, 2]), int(1)),
            (f(3, &[1, 3]), int(1)),
            (f(3, &[2, 3]), int(1)),
        ];
        let g = Game::explicit(u, table, int(1), None).unwrap();
        let picked = SetFamily::new(u, [f(3, &[1, 2]), f(3, &[1, 3]), f(3, &[2, 3])]).unwrap();
        let PipelineOutcome::Empty { certificate } =
            witness_pipeline(&g, &picked, None, DEFAULT_HULL_CAP).unwrap()
        else {
            panic!("expected emptiness")
        };
        assert_eq!(certificate.weights, vec![frac(1, 2); 3]);
        assert_eq!(certificate.collection, picked.sets());
    }

    #[test]
    fn norms() {
        let field = FieldOfSets::power_set(2);
        let m = DiscreteMeasure::new(vec![(1, int(2)), (2, int(-3))], field).unwrap();
        assert_eq!(ba_norm(&m), int(5));
        let coarse = build_subfield(&SetFamily::empty(PlayerUniverse::Finite(2)), 4).unwrap();
        let m = DiscreteMeasure::new(vec![(1, int(2)), (2, int(-3))], coarse).unwrap();
        assert_eq!(ba_norm(&m), int(1));
        let m = DiscreteMeasure::new(vec![(1, int(1))], FieldOfSets::power_set(3)).unwrap();
        assert_eq!(ba_norm(&m), int(1));
        assert!(
            DiscreteMeasure::new(vec![(1, int(1)), (1, int(2))], FieldOfSets::power_set(3))
                .is_err()
        );
    }
}
