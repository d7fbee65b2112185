//! The `--family` and `--measure` mini-languages.
//!
//! Families are separated by `|`, coalitions by `;`, members by `,`. A
//! leading `~` takes the complement of the listed players, so `~1` is
//! `ℕ\{1}` over the naturals and `N\{1}` over a finite universe.

use tugames::rational::{self, Rational};
use tugames::set_algebra::{Coalition, PlayerUniverse, SetFamily};

use crate::CliError;

pub fn parse_universe(text: &str) -> Result<PlayerUniverse, CliError> {
    let text = text.trim();
    if text == "naturals" {
        return Ok(PlayerUniverse::Naturals);
    }
    let n = text
        .strip_prefix("finite:")
        .and_then(|n| n.parse::<u32>().ok())
        .ok_or_else(|| {
            CliError::input(format!(
                "universe `{text}` should be `naturals` or `finite:<n>`"
            ))
        })?;
    Ok(PlayerUniverse::Finite(n))
}

fn parse_players(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<u32>()
                .map_err(|_| CliError::input(format!("`{p}` is not a player index")))
        })
        .collect()
}

pub fn parse_coalition(universe: PlayerUniverse, text: &str) -> Result<Coalition, CliError> {
    let text = text.trim();
    let (complement, body) = match text.strip_prefix('~') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let players = parse_players(body)?;
    let explicit = |players: Vec<u32>| {
        Coalition::explicit(universe, players)
            .map_err(|e| CliError::input(format!("`{text}`: {e}")))
    };
    match (complement, universe) {
        (false, _) => explicit(players),
        (true, PlayerUniverse::Naturals) => Coalition::cofinite(universe, players)
            .map_err(|e| CliError::input(format!("`{text}`: {e}"))),
        (true, PlayerUniverse::Finite(_)) => Ok(explicit(players)?.complement()),
    }
}

pub fn parse_family(universe: PlayerUniverse, text: &str) -> Result<SetFamily, CliError> {
    let mut sets = Vec::new();
    for part in text.split(';') {
        let coalition = parse_coalition(universe, part)?;
        if !sets.contains(&coalition) {
            sets.push(coalition);
        }
    }
    SetFamily::new(universe, sets).map_err(CliError::from)
}

pub fn parse_families(universe: PlayerUniverse, text: &str) -> Result<Vec<SetFamily>, CliError> {
    text.split('|').map(|f| parse_family(universe, f)).collect()
}

/// `point:weight` pairs separated by commas.
pub fn parse_measure(text: &str) -> Result<Vec<(u32, Rational)>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (point, weight) = pair.split_once(':').ok_or_else(|| {
                CliError::input(format!("measure entry `{pair}` should be `point:weight`"))
            })?;
            let point = point
                .trim()
                .parse::<u32>()
                .map_err(|_| CliError::input(format!("`{point}` is not a player index")))?;
            Ok((point, rational::parse(weight.trim())?))
        })
        .collect()
}

pub fn parse_rationals(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| rational::parse(p).map_err(CliError::from))
        .collect()
}
