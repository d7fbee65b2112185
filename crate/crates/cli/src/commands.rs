//! Subcommands, looked up by name.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use tugames::core_solver::{
    balanced_cover_value, balanced_violation_search, bounded_balanced_check, epsilon_equivalence,
    solve_core, sup_balanced_eq, sup_balanced_ineq, verify_core_decision, BoundedBalanced,
    CoreDecision, SupValue,
};
use tugames::game_model::{restrict_to_subfield, BoundSource, RestrictedGame, TuGame, Valuation};
use tugames::infinite_harness::{
    centered_probe, dyadic_stage_exceeding, example1_ladder, example2_ladder,
    prefix_singleton_families, LadderPool, LadderReport,
};
use tugames::rational::{self, frac, Rational};
use tugames::set_algebra::{field_hull, is_field, Coalition, PlayerUniverse, SetFamily};
use tugames::witness_builder::{ba_norm, verify_witness, DiscreteMeasure, PipelineOutcome};

use crate::family::{parse_families, parse_family, parse_measure, parse_rationals, parse_universe};
use crate::input::{read_game, rule, GameInput};
use crate::{Args, CliError};

pub trait Command {
    fn name(&self) -> &'static str;

    fn run(&self, args: &Args) -> Result<Value, CliError>;
}

pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn builtin() -> Self {
        let mut registry = CommandRegistry {
            commands: BTreeMap::new(),
        };
        let all: Vec<Box<dyn Command>> = vec![
            Box::new(Core),
            Box::new(Certify),
            Box::new(SupCheck),
            Box::new(Witness),
            Box::new(Hull),
            Box::new(Atoms),
            Box::new(Norm),
            Box::new(Ladder),
            Box::new(Probe),
            Box::new(Epsilon),
            Box::new(RestrictedCore),
            Box::new(BoundedBalancedCheck),
        ];
        for command in all {
            registry.register(command);
        }
        registry
    }

    pub fn register(&mut self, command: Box<dyn Command>) {
        self.commands.insert(command.name(), command);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Command, CliError> {
        self.commands.get(name).map(|c| c.as_ref()).ok_or_else(|| {
            let known: Vec<&str> = self.commands.keys().copied().collect();
            CliError::input(format!(
                "unknown command `{name}`; expected one of {}",
                known.join(", ")
            ))
        })
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

fn load(args: &Args) -> Result<GameInput, CliError> {
    match (&args.game, &args.rule) {
        (Some(path), None) => read_game(path, args.cap()?),
        (None, Some(name)) => Ok(GameInput::Rule(rule(name)?)),
        (Some(_), Some(_)) => Err(CliError::input("give a game file or --rule, not both")),
        (None, None) => Err(CliError::input("missing game file (or --rule)")),
    }
}

fn valuation(input: &GameInput) -> &dyn Valuation {
    match input {
        GameInput::Game(g) => g,
        GameInput::Restricted(rg) => rg,
        GameInput::Rule(r) => *r,
    }
}

fn required<'a>(value: &'a Option<String>, flag: &str, command: &str) -> Result<&'a str, CliError> {
    value
        .as_deref()
        .ok_or_else(|| CliError::input(format!("`{command}` needs --{flag}")))
}

fn single_family(universe: PlayerUniverse, text: &str) -> Result<SetFamily, CliError> {
    if text.contains('|') {
        return Err(CliError::input("expected a single family, without `|`"));
    }
    parse_family(universe, text)
}

/// A game with a finite feasible family. Rules are restricted to the field
/// hull of `--family`.
fn finite_game(input: GameInput, args: &Args, command: &str) -> Result<Box<dyn TuGame>, CliError> {
    match input {
        GameInput::Game(g) => Ok(Box::new(g)),
        GameInput::Restricted(rg) => Ok(Box::new(rg)),
        GameInput::Rule(r) => {
            let text = required(&args.family, "family", command)?;
            let family = single_family(r.universe(), text)?;
            let field = field_hull(&family, args.cap()?)?;
            Ok(Box::new(restrict_to_subfield(r, &field)?))
        }
    }
}

fn check_decision(game: &dyn TuGame, decision: &CoreDecision) -> Result<(), CliError> {
    verify_core_decision(game, decision).map_err(CliError::internal)
}

fn check_sup(game: &dyn TuGame, sup: &SupValue, exact: bool) -> Result<(), CliError> {
    if let SupValue::Finite { value, certificate } = sup {
        let checked = if exact {
            certificate.verify(game)
        } else {
            certificate.verify_sub(game)
        };
        checked.map_err(CliError::internal)?;
        if certificate.value_sum != *value {
            return Err(CliError::internal("supremum differs from its certificate"));
        }
    }
    Ok(())
}

/// Re-derives a pipeline outcome's report, or re-checks its certificate.
fn check_outcome(
    v: &dyn Valuation,
    picked: &SetFamily,
    lower_bound: Option<&Rational>,
    outcome: &PipelineOutcome,
) -> Result<(), CliError> {
    match outcome {
        PipelineOutcome::Measure { measure, report } => {
            let again = verify_witness(measure, v, picked, lower_bound)?;
            if again != *report {
                return Err(CliError::internal("witness report does not reproduce"));
            }
        }
        PipelineOutcome::Empty { certificate } => {
            certificate.verify(v).map_err(CliError::internal)?;
            if certificate.value_sum <= v.grand_value()? {
                return Err(CliError::internal("certificate shows no violation"));
            }
        }
    }
    Ok(())
}

/// `--R` as a radius fixes `L = (v(N) − R)/2`; otherwise a declared bound
/// from the game file is used.
fn lower_bound(input: &GameInput, args: &Args) -> Result<Option<Rational>, CliError> {
    if let Some(text) = &args.r {
        let radius = rational::parse(text)?;
        let grand = valuation(input).grand_value()?;
        return Ok(Some((grand - radius) * frac(1, 2)));
    }
    Ok(match input {
        GameInput::Game(g) if g.bound_source() == BoundSource::Declared => {
            Some(g.lower_bound().clone())
        }
        _ => None,
    })
}

struct Core;

impl Command for Core {
    fn name(&self) -> &'static str {
        "core"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let game = finite_game(load(args)?, args, self.name())?;
        let decision = solve_core(game.as_ref())?;
        check_decision(game.as_ref(), &decision)?;
        Ok(to_json(&decision))
    }
}

struct Certify;

impl Command for Certify {
    fn name(&self) -> &'static str {
        "certify"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let input = load(args)?;
        if let GameInput::Rule(r) = input {
            let text = required(&args.family, "family", self.name())?;
            let pool = single_family(r.universe(), text)?;
            let search = balanced_violation_search(r, &pool)?;
            if let Some(c) = &search.violation {
                c.verify(r).map_err(CliError::internal)?;
            }
            return Ok(to_json(&search));
        }
        let game = finite_game(input, args, self.name())?;
        let cover = balanced_cover_value(game.as_ref())?;
        cover
            .certificate
            .verify(game.as_ref())
            .map_err(CliError::internal)?;
        let grand = game.grand_value()?;
        Ok(json!({
            "d_star": rational::format(&cover.value),
            "grand_value": rational::format(&grand),
            "balanced": cover.value <= grand,
            "certificate": to_json(&cover.certificate),
        }))
    }
}

struct SupCheck;

impl Command for SupCheck {
    fn name(&self) -> &'static str {
        "supcheck"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let input = load(args)?;
        // A rule's --family generates its field; S is then N.
        let family_is_s = !matches!(input, GameInput::Rule(_));
        let game = finite_game(input, args, self.name())?;
        let universe = game.universe();
        let s = match &args.family {
            Some(text) if family_is_s => {
                let family = single_family(universe, text)?;
                match family.sets() {
                    [s] => s.clone(),
                    _ => return Err(CliError::input("supcheck takes one coalition in --family")),
                }
            }
            _ => Coalition::grand(universe),
        };
        let eq = sup_balanced_eq(game.as_ref(), &s)?;
        let ineq = sup_balanced_ineq(game.as_ref(), &s)?;
        check_sup(game.as_ref(), &eq, true)?;
        check_sup(game.as_ref(), &ineq, false)?;
        Ok(json!({
            "coalition": to_json(&s),
            "sup_eq": to_json(&eq),
            "sup_ineq": to_json(&ineq),
            "equal": same_sup(&eq, &ineq),
        }))
    }
}

/// Equal suprema, whichever collections attain them.
fn same_sup(a: &SupValue, b: &SupValue) -> bool {
    match (a, b) {
        (SupValue::Finite { value: x, .. }, SupValue::Finite { value: y, .. }) => x == y,
        (SupValue::Unbounded, SupValue::Unbounded) => true,
        (SupValue::Infeasible, SupValue::Infeasible) => true,
        _ => false,
    }
}

struct Witness;

impl Command for Witness {
    fn name(&self) -> &'static str {
        "witness"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let input = load(args)?;
        let v = valuation(&input);
        let text = required(&args.family, "family", self.name())?;
        let picked = single_family(v.universe(), text)?;
        let bound = lower_bound(&input, args)?;
        let outcome =
            tugames::witness_builder::witness_pipeline(v, &picked, bound.as_ref(), args.cap()?)?;
        check_outcome(v, &picked, bound.as_ref(), &outcome)?;
        Ok(to_json(&outcome))
    }
}

fn hull_of(args: &Args) -> Result<tugames::set_algebra::FieldOfSets, CliError> {
    let input = load(args)?;
    let universe = valuation(&input).universe();
    let family = match (&args.family, &input) {
        (Some(text), _) => single_family(universe, text)?,
        (None, GameInput::Game(g)) => {
            SetFamily::new(universe, g.feasible_values().into_iter().map(|(s, _)| s))?
        }
        (None, GameInput::Restricted(rg)) => rg.feasible().clone(),
        (None, GameInput::Rule(_)) => {
            return Err(CliError::input("a rule needs --family to generate a field"))
        }
    };
    let field = field_hull(&family, args.cap()?)?;
    if !is_field(field.members()) {
        return Err(CliError::internal("hull is not closed"));
    }
    Ok(field)
}

struct Hull;

impl Command for Hull {
    fn name(&self) -> &'static str {
        "hull"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let field = hull_of(args)?;
        Ok(json!({
            "members": to_json(field.members()),
            "atoms": to_json(&field.atoms()),
        }))
    }
}

struct Atoms;

impl Command for Atoms {
    fn name(&self) -> &'static str {
        "atoms"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let field = hull_of(args)?;
        Ok(json!({ "atoms": to_json(&field.atoms()) }))
    }
}

struct Norm;

impl Command for Norm {
    fn name(&self) -> &'static str {
        "norm"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let universe = match (&args.universe, &args.game, &args.rule) {
            (Some(text), _, _) => parse_universe(text)?,
            (None, None, None) => PlayerUniverse::Naturals,
            (None, _, _) => valuation(&load(args)?).universe(),
        };
        let support = parse_measure(required(&args.measure, "measure", self.name())?)?;
        let generators = match &args.family {
            Some(text) => single_family(universe, text)?,
            None => SetFamily::empty(universe),
        };
        let field = field_hull(&generators, args.cap()?)?;
        let measure = DiscreteMeasure::new(support, field)?;
        let norm = ba_norm(&measure);
        let masses: Vec<Value> = measure
            .field()
            .atoms()
            .iter()
            .map(|atom| {
                json!({
                    "atom": to_json(atom),
                    "mass": rational::format(&measure.measure(atom)),
                })
            })
            .collect();
        let by_atoms = rational::sum(
            measure
                .field()
                .atoms()
                .iter()
                .map(|atom| rational::abs(&measure.measure(atom))),
        );
        if by_atoms != norm {
            return Err(CliError::internal("norm differs from the atom sum"));
        }
        Ok(json!({
            "measure": to_json(&measure),
            "atoms": masses,
            "norm": rational::format(&norm),
        }))
    }
}

const DEFAULT_STAGES: u32 = 16;

fn write_csv(path: &std::path::Path, report: &LadderReport) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::input(format!("{}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(path).map_err(io)?;
    writer
        .write_record(["n", "numerator", "denominator", "float"])
        .map_err(io)?;
    for stage in &report.stages {
        let Some(bound) = &stage.forced_bound else {
            continue;
        };
        writer
            .write_record([
                stage.n.to_string(),
                bound.numer().to_string(),
                bound.denom().to_string(),
                rational::to_f64(bound).to_string(),
            ])
            .map_err(io)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

struct Ladder;

impl Command for Ladder {
    fn name(&self) -> &'static str {
        "ladder"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let input = load(args)?;
        let GameInput::Rule(r) = input else {
            return Err(CliError::input(
                "ladder needs a rule (--rule or a rule file)",
            ));
        };
        let n = args.n.unwrap_or(DEFAULT_STAGES);
        match r.name() {
            "example1" => {
                let pool = match args.pool.as_str() {
                    "lean" => LadderPool::Lean,
                    "full" => LadderPool::Full,
                    other => {
                        return Err(CliError::input(format!(
                            "pool `{other}` should be lean or full"
                        )))
                    }
                };
                let report = example1_ladder(n, pool)?;
                if let Some(path) = &args.csv {
                    write_csv(path, &report)?;
                }
                let mut out = to_json(&report);
                if let Some(text) = &args.r {
                    let threshold = rational::parse(text)?;
                    out["threshold"] = json!({
                        "value": rational::format(&threshold),
                        "first_stage_exceeding": report.first_stage_exceeding(&threshold),
                        "dyadic_stage": dyadic_stage_exceeding(&threshold),
                    });
                }
                Ok(out)
            }
            "example2" => {
                if args.csv.is_some() || args.r.is_some() {
                    return Err(CliError::input(
                        "--csv and --R apply to the example1 ladder",
                    ));
                }
                let report = example2_ladder(n)?;
                for stage in &report.stages {
                    let mut table = Vec::new();
                    for s in stage.feasible.iter().filter(|s| !s.is_empty()) {
                        table.push((s.clone(), r.value(s)?));
                    }
                    let rg = RestrictedGame::new(
                        r.universe(),
                        Some(stage.feasible.clone()),
                        table,
                        r.grand_value()?,
                    )?;
                    check_decision(&rg, &stage.decision)?;
                }
                if let Some(c) = &report.discrepancy.violation {
                    c.verify(r).map_err(CliError::internal)?;
                }
                Ok(to_json(&report))
            }
            other => Err(CliError::input(format!("no ladder for rule `{other}`"))),
        }
    }
}

struct Probe;

impl Command for Probe {
    fn name(&self) -> &'static str {
        "probe"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let input = load(args)?;
        let v = valuation(&input);
        let families = match (&args.family, args.n) {
            (Some(text), None) => parse_families(v.universe(), text)?,
            (None, Some(n)) if v.universe() == PlayerUniverse::Naturals => {
                prefix_singleton_families(n)?
            }
            (None, Some(n)) => (1..=n)
                .map(|k| {
                    let sets = (1..=k)
                        .map(|p| Coalition::singleton(v.universe(), p))
                        .collect::<tugames::Result<Vec<_>>>()?;
                    Ok(SetFamily::new(v.universe(), sets)?)
                })
                .collect::<Result<_, CliError>>()?,
            _ => {
                return Err(CliError::input(
                    "probe needs exactly one of --family or --n",
                ))
            }
        };
        let bound = lower_bound(&input, args)?;
        let probe = centered_probe(v, &families, bound.as_ref(), args.cap()?)?;
        for entry in &probe.entries {
            check_outcome(v, &entry.family, bound.as_ref(), &entry.outcome)?;
        }
        Ok(to_json(&probe))
    }
}

struct Epsilon;

impl Command for Epsilon {
    fn name(&self) -> &'static str {
        "epsilon"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let GameInput::Game(game) = load(args)? else {
            return Err(CliError::input(
                "epsilon needs a game file with a value table",
            ));
        };
        let eps = parse_rationals(required(&args.eps, "eps", self.name())?)?;
        let report = epsilon_equivalence(&game, &eps)?;
        if !report.consistent {
            return Err(CliError::internal(
                "core decisions disagree with the cover value",
            ));
        }
        Ok(to_json(&report))
    }
}

fn restricted(args: &Args, command: &str) -> Result<RestrictedGame, CliError> {
    match load(args)? {
        GameInput::Restricted(rg) => Ok(rg),
        other => Err(CliError::input(format!(
            "`{command}` needs a game file with `feasible`, got a {}",
            other.kind()
        ))),
    }
}

struct RestrictedCore;

impl Command for RestrictedCore {
    fn name(&self) -> &'static str {
        "restricted-core"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let rg = restricted(args, self.name())?;
        let decision = solve_core(&rg)?;
        check_decision(&rg, &decision)?;
        Ok(to_json(&decision))
    }
}

struct BoundedBalancedCheck;

impl Command for BoundedBalancedCheck {
    fn name(&self) -> &'static str {
        "bounded-balanced"
    }

    fn run(&self, args: &Args) -> Result<Value, CliError> {
        let rg = restricted(args, self.name())?;
        match bounded_balanced_check(&rg, args.cap()?)? {
            BoundedBalanced::Extension { game, witness } => {
                let decision = CoreDecision::NonEmpty { witness };
                check_decision(&game, &decision)?;
                for (s, value) in rg.table() {
                    if game.value(s)? != *value {
                        return Err(CliError::internal(format!(
                            "extension changes the value of {s}"
                        )));
                    }
                }
                let extension: Vec<Value> = game
                    .feasible_values()
                    .iter()
                    .map(|(s, v)| json!({ "set": to_json(s), "value": rational::format(v) }))
                    .collect();
                Ok(json!({
                    "status": "extension",
                    "witness": to_json(decision.witness().expect("non-empty")),
                    "extension": extension,
                }))
            }
            BoundedBalanced::Refutation { certificate } => {
                certificate.verify(&rg).map_err(CliError::internal)?;
                Ok(json!({
                    "status": "refutation",
                    "certificate": to_json(&certificate),
                }))
            }
        }
    }
}
