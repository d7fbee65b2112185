//! Game files.
//!
//! ```json
//! {"universe": {"finite": 3} | "naturals",
//!  "values": [{"set": [1, 2] | {"excluded": [1]}, "value": "1/2"}],
//!  "grand": "1",
//!  "lower_bound": "-1",
//!  "feasible": [[1], [2, 3]],
//!  "rule": "example1"}
//! ```
//!
//! `rule` excludes `values`. A `feasible` list makes a restricted game. A
//! table over the naturals defines a game on the field hull of its sets.

use std::path::Path;

use serde::Deserialize;
use tugames::game_model::{Game, GameRule, RestrictedGame, RuleRegistry};
use tugames::rational::{self, Rational};
use tugames::set_algebra::{field_hull, Coalition, PlayerUniverse, SetFamily};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawUniverse {
    Finite(u32),
    Naturals,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSet {
    Members(Vec<u32>),
    Excluded { excluded: Vec<u32> },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Text(String),
    Integer(i64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    set: RawSet,
    value: RawNumber,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    universe: RawUniverse,
    #[serde(default)]
    values: Option<Vec<Entry>>,
    #[serde(default)]
    grand: Option<RawNumber>,
    #[serde(default)]
    lower_bound: Option<RawNumber>,
    #[serde(default)]
    feasible: Option<Vec<RawSet>>,
    #[serde(default)]
    rule: Option<String>,
}

pub enum GameInput {
    Game(Game),
    Restricted(RestrictedGame),
    Rule(&'static dyn GameRule),
}

impl GameInput {
    pub fn kind(&self) -> &'static str {
        match self {
            GameInput::Game(_) => "game",
            GameInput::Restricted(_) => "restricted",
            GameInput::Rule(_) => "rule",
        }
    }
}

/// Rules live for the whole process.
pub fn rule(name: &str) -> Result<&'static dyn GameRule, CliError> {
    static REGISTRY: std::sync::OnceLock<RuleRegistry> = std::sync::OnceLock::new();
    REGISTRY
        .get_or_init(RuleRegistry::builtin)
        .get(name)
        .map_err(CliError::from)
}

fn number(raw: &RawNumber, at: &str) -> Result<Rational, CliError> {
    match raw {
        RawNumber::Text(text) => {
            rational::parse(text).map_err(|e| CliError::input(format!("{at}: {e}")))
        }
        RawNumber::Integer(n) => Ok(rational::int(*n)),
    }
}

fn coalition(universe: PlayerUniverse, raw: &RawSet, at: &str) -> Result<Coalition, CliError> {
    let built = match (raw, universe) {
        (RawSet::Members(players), _) => Coalition::explicit(universe, players.iter().copied()),
        (RawSet::Excluded { excluded }, PlayerUniverse::Naturals) => {
            Coalition::cofinite(universe, excluded.iter().copied())
        }
        (RawSet::Excluded { excluded }, PlayerUniverse::Finite(_)) => {
            Coalition::explicit(universe, excluded.iter().copied()).map(|s| s.complement())
        }
    };
    built.map_err(|e| CliError::input(format!("{at}: {e}")))
}

pub fn read_game(path: &Path, cap: usize) -> Result<GameInput, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_game(&text, cap).map_err(|e| e.context(&path.display().to_string()))
}

pub fn parse_game(text: &str, cap: usize) -> Result<GameInput, CliError> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
    let universe = match file.universe {
        RawUniverse::Finite(n) => PlayerUniverse::Finite(n),
        RawUniverse::Naturals => PlayerUniverse::Naturals,
    };

    if let Some(name) = &file.rule {
        if file.values.is_some() || file.feasible.is_some() || file.grand.is_some() {
            return Err(CliError::input(
                "a rule file takes no `values`, `feasible` or `grand`",
            ));
        }
        if universe != PlayerUniverse::Naturals {
            return Err(CliError::input("rules are defined over the naturals"));
        }
        return Ok(GameInput::Rule(rule(name)?));
    }

    let entries = file.values.unwrap_or_default();
    let mut table = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        let at = format!("values[{i}]");
        let s = coalition(universe, &entry.set, &at)?;
        let v = number(&entry.value, &at)?;
        if s.is_empty() && v != rational::int(0) {
            return Err(CliError::input(format!(
                "{at}: v(∅) must be 0, got {}",
                rational::format(&v)
            )));
        }
        if let Some(j) = table.iter().position(|(t, _)| *t == s) {
            return Err(CliError::input(format!(
                "{at}: duplicate coalition {s} (first listed at values[{j}])"
            )));
        }
        table.push((s, v));
    }
    let grand_set = Coalition::grand(universe);
    let grand = match &file.grand {
        Some(g) => number(g, "grand")?,
        None => table
            .iter()
            .find(|(s, _)| *s == grand_set)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| CliError::input("missing `grand` value"))?,
    };
    let lower_bound = file
        .lower_bound
        .as_ref()
        .map(|l| number(l, "lower_bound"))
        .transpose()?;

    if let Some(feasible) = &file.feasible {
        if lower_bound.is_some() {
            return Err(CliError::input("restricted games take no `lower_bound`"));
        }
        let sets = feasible
            .iter()
            .enumerate()
            .map(|(i, s)| coalition(universe, s, &format!("feasible[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let family = SetFamily::new(universe, sets)?;
        let rg = RestrictedGame::new(universe, Some(family), table, grand)?;
        return Ok(GameInput::Restricted(rg));
    }

    let game = match universe {
        PlayerUniverse::Finite(_) => Game::explicit(universe, table, grand, lower_bound)?,
        PlayerUniverse::Naturals => {
            let listed = SetFamily::new(universe, table.iter().map(|(s, _)| s.clone()))?;
            let field = field_hull(&listed, cap)?;
            Game::on_field(field, table, grand, lower_bound)?
        }
    };
    Ok(GameInput::Game(game))
}
