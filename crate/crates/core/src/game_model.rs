//! TU games: explicit games on a power set or a finite field, games with
//! restricted cooperation, and named valuation rules over the naturals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, frac, int, Rational};
use crate::set_algebra::{regions, Coalition, FieldOfSets, PlayerUniverse, SetFamily};

/// Anything that assigns exact values to coalitions.
pub trait Valuation {
    fn universe(&self) -> PlayerUniverse;

    fn value(&self, s: &Coalition) -> Result<Rational>;

    fn grand_value(&self) -> Result<Rational> {
        self.value(&Coalition::grand(self.universe()))
    }
}

/// A valuation whose feasible family is finite and known.
pub trait TuGame: Valuation {
    /// Every feasible coalition except ∅, with its value, in canonical order.
    /// The grand coalition is always included.
    fn feasible_values(&self) -> Vec<(Coalition, Rational)>;

    /// The partition of `N` cut out by the feasible family.
    fn regions(&self) -> Vec<Coalition> {
        let generators: Vec<Coalition> =
            self.feasible_values().into_iter().map(|(s, _)| s).collect();
        regions(self.universe(), &generators)
            .into_iter()
            .map(|r| r.set)
            .collect()
    }
}

/// Where a [`Game`] is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Every subset of a finite universe.
    PowerSet,
    Field(FieldOfSets),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Declared,
    /// Minimum of the values on the domain (including `v(∅) = 0`).
    Inferred,
}

/// A game `v: A → ℚ` on a power set or a finite field `A`.
///
/// Coalitions of the domain missing from the value table are worth 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    universe: PlayerUniverse,
    domain: Domain,
    values: BTreeMap<Coalition, Rational>,
    grand_value: Rational,
    lower_bound: Rational,
    bound_source: BoundSource,
}

impl Game {
    /// A game on the power set of a finite universe.
    pub fn explicit(
        universe: PlayerUniverse,
        table: Vec<(Coalition, Rational)>,
        grand_value: Rational,
        lower_bound: Option<Rational>,
    ) -> Result<Self> {
        match universe {
            PlayerUniverse::Finite(n) if n <= 30 => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "a power-set game needs a finite universe of at most 30 players, got {universe}"
                )))
            }
        }
        Self::build(universe, Domain::PowerSet, table, grand_value, lower_bound)
    }

    /// A game on the members of a finite field.
    pub fn on_field(
        field: FieldOfSets,
        table: Vec<(Coalition, Rational)>,
        grand_value: Rational,
        lower_bound: Option<Rational>,
    ) -> Result<Self> {
        let universe = field.universe();
        Self::build(
            universe,
            Domain::Field(field),
            table,
            grand_value,
            lower_bound,
        )
    }

    fn build(
        universe: PlayerUniverse,
        domain: Domain,
        table: Vec<(Coalition, Rational)>,
        grand_value: Rational,
        lower_bound: Option<Rational>,
    ) -> Result<Self> {
        let grand = Coalition::grand(universe);
        let mut values = BTreeMap::new();
        for (s, v) in table {
            if s.universe() != universe {
                return Err(Error::UniverseMismatch {
                    left: universe.to_string(),
                    right: s.universe().to_string(),
                });
            }
            let feasible = match &domain {
                Domain::PowerSet => true,
                Domain::Field(f) => f.contains(&s),
            };
            if !feasible {
                return Err(Error::Infeasible(s.to_string()));
            }
            if s.is_empty() && !v.is_zero() {
                return Err(Error::EmptyCoalitionValue(rational::format(&v)));
            }
            if s == grand && v != grand_value {
                return Err(Error::GrandValueConflict {
                    table: rational::format(&v),
                    grand: rational::format(&grand_value),
                });
            }
            if values.insert(s.clone(), v).is_some() {
                return Err(Error::DuplicateCoalition(s.to_string()));
            }
        }
        values.remove(&Coalition::empty(universe));
        values.insert(grand, grand_value.clone());

        let mut game = Game {
            universe,
            domain,
            values,
            grand_value,
            lower_bound: Rational::zero(),
            bound_source: BoundSource::Inferred,
        };
        let minimum = game.minimum_value();
        match lower_bound {
            Some(bound) => {
                if let Some((s, v)) = game.values.iter().find(|(_, v)| **v < bound) {
                    return Err(Error::BelowLowerBound {
                        coalition: s.to_string(),
                        value: rational::format(v),
                        bound: rational::format(&bound),
                    });
                }
                if bound.is_positive() {
                    // v(∅) = 0 is always a value of the game.
                    return Err(Error::BelowLowerBound {
                        coalition: "∅".into(),
                        value: "0".into(),
                        bound: rational::format(&bound),
                    });
                }
                game.lower_bound = bound;
                game.bound_source = BoundSource::Declared;
            }
            None => game.lower_bound = minimum,
        }
        Ok(game)
    }

    /// Smallest value over the domain; unlisted coalitions count as 0.
    fn minimum_value(&self) -> Rational {
        self.values
            .values()
            .fold(Rational::zero(), |m, v| if *v < m { v.clone() } else { m })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// The explicitly stored values (∅ omitted, `N` present).
    pub fn table(&self) -> &BTreeMap<Coalition, Rational> {
        &self.values
    }

    pub fn lower_bound(&self) -> &Rational {
        &self.lower_bound
    }

    pub fn bound_source(&self) -> BoundSource {
        self.bound_source
    }

    pub fn is_feasible(&self, s: &Coalition) -> bool {
        s.universe() == self.universe
            && match &self.domain {
                Domain::PowerSet => true,
                Domain::Field(f) => f.contains(s),
            }
    }

    /// Same game with every value multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Result<Game> {
        if !factor.is_positive() {
            return Err(Error::InvalidArgument(
                "scale factor must be positive".into(),
            ));
        }
        let table = self
            .values
            .iter()
            .map(|(s, v)| (s.clone(), v * factor))
            .collect();
        Self::build(
            self.universe,
            self.domain.clone(),
            table,
            &self.grand_value * factor,
            None,
        )
    }
}

impl Valuation for Game {
    fn universe(&self) -> PlayerUniverse {
        self.universe
    }

    fn value(&self, s: &Coalition) -> Result<Rational> {
        if !self.is_feasible(s) {
            return Err(Error::Infeasible(s.to_string()));
        }
        Ok(self.values.get(s).cloned().unwrap_or_else(Rational::zero))
    }

    fn grand_value(&self) -> Result<Rational> {
        Ok(self.grand_value.clone())
    }
}

impl TuGame for Game {
    fn feasible_values(&self) -> Vec<(Coalition, Rational)> {
        let members: Vec<Coalition> = match &self.domain {
            Domain::PowerSet => {
                let n = self.universe.size().expect("power-set games are finite");
                (1..1u64 << n).map(|m| Coalition::from_mask(n, m)).collect()
            }
            Domain::Field(f) => f
                .members()
                .iter()
                .filter(|s| !s.is_empty())
                .cloned()
                .collect(),
        };
        let mut out: Vec<(Coalition, Rational)> = members
            .into_iter()
            .map(|s| {
                let v = self.values.get(&s).cloned().unwrap_or_else(Rational::zero);
                (s, v)
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn regions(&self) -> Vec<Coalition> {
        match &self.domain {
            Domain::PowerSet => {
                let n = self.universe.size().expect("power-set games are finite");
                (1..=n)
                    .map(|p| Coalition::singleton(self.universe, p).expect("in range"))
                    .collect()
            }
            Domain::Field(f) => f.atoms().to_vec(),
        }
    }
}

/// `make_explicit` in function form.
pub fn make_explicit(
    universe: PlayerUniverse,
    table: Vec<(Coalition, Rational)>,
    grand_value: Rational,
    lower_bound: Option<Rational>,
) -> Result<Game> {
    Game::explicit(universe, table, grand_value, lower_bound)
}

/// The game `v_ε`: grand value raised by `eps`, everything else unchanged.
pub fn shift_epsilon(game: &Game, eps: &Rational) -> Result<Game> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveEpsilon(rational::format(eps)));
    }
    let mut shifted = game.clone();
    shifted.grand_value += eps;
    shifted
        .values
        .insert(Coalition::grand(game.universe), shifted.grand_value.clone());
    Ok(shifted)
}

/// A game `v′: A′ → ℚ` where `A′` is any finite family containing ∅ and `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedGame {
    feasible: SetFamily,
    values: BTreeMap<Coalition, Rational>,
    grand_value: Rational,
}

impl RestrictedGame {
    /// With `feasible = None` the family is the table's coalitions plus ∅ and `N`.
    /// Otherwise every member of the family other than ∅ and `N` needs a value.
    pub fn new(
        universe: PlayerUniverse,
        feasible: Option<SetFamily>,
        table: Vec<(Coalition, Rational)>,
        grand_value: Rational,
    ) -> Result<Self> {
        let grand = Coalition::grand(universe);
        let mut values = BTreeMap::new();
        for (s, v) in table {
            if s.universe() != universe {
                return Err(Error::UniverseMismatch {
                    left: universe.to_string(),
                    right: s.universe().to_string(),
                });
            }
            if s.is_empty() && !v.is_zero() {
                return Err(Error::EmptyCoalitionValue(rational::format(&v)));
            }
            if s == grand && v != grand_value {
                return Err(Error::GrandValueConflict {
                    table: rational::format(&v),
                    grand: rational::format(&grand_value),
                });
            }
            if values.insert(s.clone(), v).is_some() {
                return Err(Error::DuplicateCoalition(s.to_string()));
            }
        }
        values.remove(&Coalition::empty(universe));
        values.insert(grand.clone(), grand_value.clone());
        let feasible = match feasible {
            Some(family) => {
                if family.universe() != universe {
                    return Err(Error::UniverseMismatch {
                        left: universe.to_string(),
                        right: family.universe().to_string(),
                    });
                }
                let family = family.with_trivial();
                if let Some(s) = values.keys().find(|s| !family.contains(s)) {
                    return Err(Error::Infeasible(s.to_string()));
                }
                if let Some(s) = family
                    .iter()
                    .find(|s| !s.is_empty() && !values.contains_key(*s))
                {
                    return Err(Error::MissingValue(s.to_string()));
                }
                family
            }
            None => SetFamily::new(universe, values.keys().cloned())?.with_trivial(),
        };
        Ok(RestrictedGame {
            feasible,
            values,
            grand_value,
        })
    }

    /// `A′`, including ∅ and `N`.
    pub fn feasible(&self) -> &SetFamily {
        &self.feasible
    }

    pub fn table(&self) -> &BTreeMap<Coalition, Rational> {
        &self.values
    }
}

impl Valuation for RestrictedGame {
    fn universe(&self) -> PlayerUniverse {
        self.feasible.universe()
    }

    fn value(&self, s: &Coalition) -> Result<Rational> {
        if s.is_empty() && s.universe() == self.universe() {
            return Ok(Rational::zero());
        }
        self.values
            .get(s)
            .cloned()
            .ok_or_else(|| Error::Infeasible(s.to_string()))
    }

    fn grand_value(&self) -> Result<Rational> {
        Ok(self.grand_value.clone())
    }
}

impl TuGame for RestrictedGame {
    fn feasible_values(&self) -> Vec<(Coalition, Rational)> {
        self.feasible
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| (s.clone(), self.values[s].clone()))
            .collect()
    }
}

/// A named valuation over the naturals, evaluated exactly on finite and
/// cofinite coalitions.
pub trait GameRule: Valuation + Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Whether the rule is defined at `s`.
    fn defined_at(&self, s: &Coalition) -> bool;

    /// The members of the rule's feasible family that lie inside
    /// `{1, …, n}` or are cofinite with excluded set inside `{1, …, n}`,
    /// when the family is not all finite/cofinite sets.
    fn feasible_within(&self, _n: u32) -> Option<SetFamily> {
        None
    }
}

impl fmt::Debug for dyn GameRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GameRule({})", self.name())
    }
}

fn reciprocal(n: u32) -> Rational {
    frac(1, i64::from(n))
}

fn outside(rule: &str, s: &Coalition) -> Error {
    Error::OutsideRuleDomain {
        rule: rule.to_string(),
        coalition: s.to_string(),
    }
}

/// `v({1}) = 1`, `v({1,n}) = 1 + 1/n`, `v(ℕ\T) = −Σ_{n∈T} 1/n`, else 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1;

impl Valuation for Example1 {
    fn universe(&self) -> PlayerUniverse {
        PlayerUniverse::Naturals
    }

    fn value(&self, s: &Coalition) -> Result<Rational> {
        if s.universe() != PlayerUniverse::Naturals {
            return Err(outside(self.name(), s));
        }
        if s.is_cofinite() {
            return Ok(-crate::rational::sum(
                s.members().iter().map(|&n| reciprocal(n)),
            ));
        }
        Ok(match s.members() {
            [1] => int(1),
            [1, n] => int(1) + reciprocal(*n),
            _ => Rational::zero(),
        })
    }
}

impl GameRule for Example1 {
    fn name(&self) -> &'static str {
        "example1"
    }

    fn summary(&self) -> &'static str {
        "balanced, unbounded below, empty ba-core"
    }

    fn defined_at(&self, s: &Coalition) -> bool {
        s.universe() == PlayerUniverse::Naturals
    }
}

/// Restricted to `A′ = {∅, {1,i} (i ≥ 1), ℕ\{1}, ℕ}` with `v′({1}) = 2`,
/// `v′({1,n}) = 2 + 1/n`, `v′(ℕ\{1}) = 0`, `v′(ℕ) = 1`.
///
/// `{1}` is the `i = 1` member of the pair family and is kept.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example2;

impl Example2 {
    fn member(s: &Coalition) -> bool {
        if s.universe() != PlayerUniverse::Naturals {
            return false;
        }
        match (s.is_cofinite(), s.members()) {
            (false, []) | (false, [1]) | (false, [1, _]) => true,
            (true, []) | (true, [1]) => true,
            _ => false,
        }
    }
}

impl Valuation for Example2 {
    fn universe(&self) -> PlayerUniverse {
        PlayerUniverse::Naturals
    }

    fn value(&self, s: &Coalition) -> Result<Rational> {
        if !Self::member(s) {
            return Err(outside(self.name(), s));
        }
        Ok(match (s.is_cofinite(), s.members()) {
            (false, [1]) => int(2),
            (false, [1, n]) => int(2) + reciprocal(*n),
            (true, []) => int(1),
            _ => Rational::zero(),
        })
    }
}

impl GameRule for Example2 {
    fn name(&self) -> &'static str {
        "example2"
    }

    fn summary(&self) -> &'static str {
        "non-negative game with restricted cooperation and empty core"
    }

    fn defined_at(&self, s: &Coalition) -> bool {
        Self::member(s)
    }

    fn feasible_within(&self, n: u32) -> Option<SetFamily> {
        let u = PlayerUniverse::Naturals;
        let mut sets = vec![
            Coalition::empty(u),
            Coalition::singleton(u, 1).expect("1 ≥ 1"),
            Coalition::cofinite(u, [1]).expect("naturals"),
            Coalition::grand(u),
        ];
        sets.extend((2..=n).map(|i| Coalition::explicit(u, [1, i]).expect("positive players")));
        Some(SetFamily::new(u, sets).expect("one universe"))
    }
}

/// Rules selectable by name.
pub struct RuleRegistry {
    rules: BTreeMap<&'static str, Box<dyn GameRule>>,
}

impl RuleRegistry {
    pub fn empty() -> Self {
        RuleRegistry {
            rules: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(Example1));
        registry.register(Box::new(Example2));
        registry
    }

    pub fn register(&mut self, rule: Box<dyn GameRule>) {
        self.rules.insert(rule.name(), rule);
    }

    pub fn get(&self, name: &str) -> Result<&dyn GameRule> {
        self.rules
            .get(name)
            .map(|r| r.as_ref())
            .ok_or_else(|| Error::UnknownRule(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.rules.keys().copied()
    }
}

/// Evaluates a rule at a coalition.
pub fn evaluate(rule: &dyn GameRule, s: &Coalition) -> Result<Rational> {
    rule.value(s)
}

/// The explicit game on `field` with values taken from `v`; the lower bound
/// is the minimum over the field's members.
pub fn restrict_to_subfield(v: &dyn Valuation, field: &FieldOfSets) -> Result<Game> {
    let mut table = Vec::with_capacity(field.members().len());
    for s in field.members().iter() {
        if !s.is_empty() {
            table.push((s.clone(), v.value(s)?));
        }
    }
    let grand = v.grand_value()?;
    Game::on_field(field.clone(), table, grand, None)
}
