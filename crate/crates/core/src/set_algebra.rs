//! Coalitions, finite families of coalitions, fields of sets and their atoms.
//!
//! Coalitions are either explicit finite sets of players or, over the
//! natural numbers, cofinite sets stored by their finite excluded part.
//! Together these form the finite/cofinite field, which is all the infinite
//! examples need.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest finite universe that gets a machine-word bitmask.
const MASK_LIMIT: u32 = 64;

/// Default upper bound on the number of members a field hull may have.
pub const DEFAULT_HULL_CAP: usize = 1 << 16;

/// The ground set of players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlayerUniverse {
    /// Players `1..=n`.
    Finite(u32),
    /// Players `1, 2, 3, ...`.
    Naturals,
}

impl PlayerUniverse {
    pub fn is_finite(self) -> bool {
        matches!(self, PlayerUniverse::Finite(_))
    }

    pub fn size(self) -> Option<u32> {
        match self {
            PlayerUniverse::Finite(n) => Some(n),
            PlayerUniverse::Naturals => None,
        }
    }

    fn check_player(self, player: u32) -> Result<()> {
        if player == 0 {
            return Err(Error::ZeroPlayer);
        }
        match self {
            PlayerUniverse::Finite(n) if player > n => Err(Error::PlayerOutOfRange {
                player: u64::from(player),
                universe: self.to_string(),
            }),
            _ => Ok(()),
        }
    }

    fn check_same(self, other: PlayerUniverse) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for PlayerUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerUniverse::Finite(n) => write!(f, "{{1..{n}}}"),
            PlayerUniverse::Naturals => write!(f, "ℕ"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoalitionKind {
    Explicit,
    Cofinite,
}

/// A set of players in canonical form.
///
/// For [`CoalitionKind::Explicit`] `members` is the set itself; for
/// [`CoalitionKind::Cofinite`] it is the finite excluded set. Members are
/// strictly increasing. Over finite universes of at most 64 players a
/// bitmask mirrors the member list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    universe: PlayerUniverse,
    kind: CoalitionKind,
    members: Vec<u32>,
    mask: Option<u64>,
}

impl Coalition {
    fn from_sorted(universe: PlayerUniverse, kind: CoalitionKind, members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        let mask = match universe {
            PlayerUniverse::Finite(n) if n <= MASK_LIMIT => {
                Some(members.iter().fold(0u64, |m, &p| m | (1u64 << (p - 1))))
            }
            _ => None,
        };
        Coalition {
            universe,
            kind,
            members,
            mask,
        }
    }

    pub fn empty(universe: PlayerUniverse) -> Self {
        Self::from_sorted(universe, CoalitionKind::Explicit, Vec::new())
    }

    /// The grand coalition `N`.
    pub fn grand(universe: PlayerUniverse) -> Self {
        match universe {
            PlayerUniverse::Finite(n) => {
                Self::from_sorted(universe, CoalitionKind::Explicit, (1..=n).collect())
            }
            PlayerUniverse::Naturals => {
                Self::from_sorted(universe, CoalitionKind::Cofinite, Vec::new())
            }
        }
    }

    pub fn explicit<I: IntoIterator<Item = u32>>(
        universe: PlayerUniverse,
        players: I,
    ) -> Result<Self> {
        let mut members: Vec<u32> = players.into_iter().collect();
        for &p in &members {
            universe.check_player(p)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted(
            universe,
            CoalitionKind::Explicit,
            members,
        ))
    }

    /// `ℕ \ excluded`; only over the naturals.
    pub fn cofinite<I: IntoIterator<Item = u32>>(
        universe: PlayerUniverse,
        excluded: I,
    ) -> Result<Self> {
        if universe.is_finite() {
            return Err(Error::CofiniteInFiniteUniverse);
        }
        let mut members: Vec<u32> = excluded.into_iter().collect();
        for &p in &members {
            universe.check_player(p)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted(
            universe,
            CoalitionKind::Cofinite,
            members,
        ))
    }

    pub fn singleton(universe: PlayerUniverse, player: u32) -> Result<Self> {
        Self::explicit(universe, [player])
    }

    /// Coalition of a finite universe given as a bitmask (bit `i-1` is player `i`).
    pub fn from_mask(n: u32, mask: u64) -> Self {
        assert!(
            n <= MASK_LIMIT && (n == 64 || mask >> n == 0),
            "mask outside universe"
        );
        let members = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| i + 1)
            .collect();
        Self::from_sorted(PlayerUniverse::Finite(n), CoalitionKind::Explicit, members)
    }

    pub fn universe(&self) -> PlayerUniverse {
        self.universe
    }

    pub fn kind(&self) -> CoalitionKind {
        self.kind
    }

    pub fn is_cofinite(&self) -> bool {
        self.kind == CoalitionKind::Cofinite
    }

    /// The stored player list: members for explicit, excluded players for cofinite.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn mask(&self) -> Option<u64> {
        self.mask
    }

    /// Characteristic function `χ_S(i)`.
    pub fn contains(&self, player: u32) -> bool {
        if let Some(mask) = self.mask {
            return player >= 1 && player <= 64 && mask >> (player - 1) & 1 == 1;
        }
        let listed = self.members.binary_search(&player).is_ok();
        match self.kind {
            CoalitionKind::Explicit => listed,
            CoalitionKind::Cofinite => player >= 1 && !listed,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.kind == CoalitionKind::Explicit && self.members.is_empty()
    }

    pub fn is_grand(&self) -> bool {
        match self.universe {
            PlayerUniverse::Finite(n) => self.members.len() == n as usize,
            PlayerUniverse::Naturals => self.is_cofinite() && self.members.is_empty(),
        }
    }

    /// Number of players, when finite.
    pub fn cardinality(&self) -> Option<usize> {
        match self.kind {
            CoalitionKind::Explicit => Some(self.members.len()),
            CoalitionKind::Cofinite => None,
        }
    }

    /// Least player of the coalition, if any.
    pub fn least_member(&self) -> Option<u32> {
        match self.kind {
            CoalitionKind::Explicit => self.members.first().copied(),
            CoalitionKind::Cofinite => {
                let mut candidate = 1;
                for &p in &self.members {
                    if p != candidate {
                        break;
                    }
                    candidate += 1;
                }
                Some(candidate)
            }
        }
    }

    pub fn complement(&self) -> Coalition {
        match (self.universe, self.kind) {
            (PlayerUniverse::Finite(n), _) => {
                let members = complement_in(&self.members, n);
                Self::from_sorted(self.universe, CoalitionKind::Explicit, members)
            }
            (PlayerUniverse::Naturals, CoalitionKind::Explicit) => {
                Self::from_sorted(self.universe, CoalitionKind::Cofinite, self.members.clone())
            }
            (PlayerUniverse::Naturals, CoalitionKind::Cofinite) => {
                Self::from_sorted(self.universe, CoalitionKind::Explicit, self.members.clone())
            }
        }
    }

    pub fn union(&self, other: &Coalition) -> Result<Coalition> {
        self.universe.check_same(other.universe)?;
        if let (Some(a), Some(b), PlayerUniverse::Finite(n)) =
            (self.mask, other.mask, self.universe)
        {
            return Ok(Self::from_mask(n, a | b));
        }
        use CoalitionKind::*;
        let (kind, members) = match (self.kind, other.kind) {
            (Explicit, Explicit) => (Explicit, merge_union(&self.members, &other.members)),
            (Cofinite, Explicit) => (Cofinite, merge_difference(&self.members, &other.members)),
            (Explicit, Cofinite) => (Cofinite, merge_difference(&other.members, &self.members)),
            (Cofinite, Cofinite) => (Cofinite, merge_intersection(&self.members, &other.members)),
        };
        Ok(Self::from_sorted(self.universe, kind, members))
    }

    pub fn intersect(&self, other: &Coalition) -> Result<Coalition> {
        self.universe.check_same(other.universe)?;
        if let (Some(a), Some(b), PlayerUniverse::Finite(n)) =
            (self.mask, other.mask, self.universe)
        {
            return Ok(Self::from_mask(n, a & b));
        }
        use CoalitionKind::*;
        let (kind, members) = match (self.kind, other.kind) {
            (Explicit, Explicit) => (Explicit, merge_intersection(&self.members, &other.members)),
            (Cofinite, Explicit) => (Explicit, merge_difference(&other.members, &self.members)),
            (Explicit, Cofinite) => (Explicit, merge_difference(&self.members, &other.members)),
            (Cofinite, Cofinite) => (Cofinite, merge_union(&self.members, &other.members)),
        };
        Ok(Self::from_sorted(self.universe, kind, members))
    }

    pub fn difference(&self, other: &Coalition) -> Result<Coalition> {
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &Coalition) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &Coalition) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }
}

impl Ord for Coalition {
    /// Explicit before cofinite, then by stored size, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.members.len().cmp(&other.members.len()))
            .then_with(|| self.members.cmp(&other.members))
            .then(self.universe.cmp(&other.universe))
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = self
            .members
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",");
        match self.kind {
            CoalitionKind::Explicit if self.members.is_empty() => write!(f, "∅"),
            CoalitionKind::Explicit => write!(f, "{{{list}}}"),
            CoalitionKind::Cofinite if self.members.is_empty() => write!(f, "ℕ"),
            CoalitionKind::Cofinite => write!(f, "ℕ\\{{{list}}}"),
        }
    }
}

impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.kind {
            CoalitionKind::Explicit => self.members.serialize(serializer),
            CoalitionKind::Cofinite => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("excluded", &self.members)?;
                map.end()
            }
        }
    }
}

fn complement_in(members: &[u32], n: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(n as usize - members.len());
    let mut it = members.iter().peekable();
    for p in 1..=n {
        if it.peek() == Some(&&p) {
            it.next();
        } else {
            out.push(p);
        }
    }
    out
}

fn merge_union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_intersection(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// `a \ b`.
fn merge_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            out.push(x);
        }
    }
    out
}

/// A finite family of distinct coalitions in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    universe: PlayerUniverse,
    sets: Vec<Coalition>,
}

impl SetFamily {
    pub fn new<I: IntoIterator<Item = Coalition>>(
        universe: PlayerUniverse,
        sets: I,
    ) -> Result<Self> {
        let mut sets: Vec<Coalition> = sets.into_iter().collect();
        for s in &sets {
            universe.check_same(s.universe())?;
        }
        sets.sort();
        sets.dedup();
        Ok(SetFamily { universe, sets })
    }

    pub fn empty(universe: PlayerUniverse) -> Self {
        SetFamily {
            universe,
            sets: Vec::new(),
        }
    }

    /// Every subset of a finite universe of at most 64 players (capped by memory).
    pub fn power_set(n: u32) -> Self {
        assert!(n < 31, "power set of {n} players is too large");
        let sets = (0..1u64 << n)
            .map(|m| Coalition::from_mask(n, m))
            .collect::<Vec<_>>();
        Self::new(PlayerUniverse::Finite(n), sets).expect("same universe")
    }

    pub fn universe(&self) -> PlayerUniverse {
        self.universe
    }

    pub fn sets(&self) -> &[Coalition] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Coalition> {
        self.sets.iter()
    }

    pub fn contains(&self, s: &Coalition) -> bool {
        self.sets.binary_search(s).is_ok()
    }

    /// Copy of the family with `s` added.
    pub fn with(&self, s: Coalition) -> Result<Self> {
        Self::new(
            self.universe,
            self.sets.iter().cloned().chain(std::iter::once(s)),
        )
    }

    /// Copy of the family with ∅ and N added.
    pub fn with_trivial(&self) -> Self {
        let extra = [
            Coalition::empty(self.universe),
            Coalition::grand(self.universe),
        ];
        Self::new(self.universe, self.sets.iter().cloned().chain(extra)).expect("same universe")
    }

    pub fn regions(&self) -> Vec<Region> {
        regions(self.universe, &self.sets)
    }
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.sets.serialize(serializer)
    }
}

/// One cell of the partition generated by a family: the players whose
/// membership pattern across the family equals `signature`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub set: Coalition,
    /// `signature[p]` is true iff the region lies inside the `p`-th generator.
    pub signature: Vec<bool>,
}

/// Non-empty intersections `∩ S_p^{ε_p}` of the generators and their
/// complements, in canonical coalition order.
///
/// Over the naturals only finitely many players are mentioned by the
/// generators; every unmentioned player shares one signature, so at most one
/// region is cofinite.
pub fn regions(universe: PlayerUniverse, generators: &[Coalition]) -> Vec<Region> {
    let signature_of = |p: u32| {
        generators
            .iter()
            .map(|g| g.contains(p))
            .collect::<Vec<bool>>()
    };
    let mut groups: BTreeMap<Vec<bool>, Vec<u32>> = BTreeMap::new();
    let mut out = Vec::new();
    match universe {
        PlayerUniverse::Finite(n) => {
            for p in 1..=n {
                groups.entry(signature_of(p)).or_default().push(p);
            }
            for (signature, players) in groups {
                let set = Coalition::from_sorted(universe, CoalitionKind::Explicit, players);
                out.push(Region { set, signature });
            }
        }
        PlayerUniverse::Naturals => {
            let mentioned = generators
                .iter()
                .fold(Vec::new(), |acc, g| merge_union(&acc, g.members()));
            for &p in &mentioned {
                groups.entry(signature_of(p)).or_default().push(p);
            }
            let generic: Vec<bool> = generators.iter().map(Coalition::is_cofinite).collect();
            let generic_players = groups.remove(&generic).unwrap_or_default();
            for (signature, players) in groups {
                let set = Coalition::from_sorted(universe, CoalitionKind::Explicit, players);
                out.push(Region { set, signature });
            }
            let excluded = merge_difference(&mentioned, &generic_players);
            let set = Coalition::from_sorted(universe, CoalitionKind::Cofinite, excluded);
            out.push(Region {
                set,
                signature: generic,
            });
        }
    }
    out.sort_by(|a, b| a.set.cmp(&b.set));
    out
}

/// True iff ∅ is a member and the family is closed under complement and pairwise union.
pub fn is_field(family: &SetFamily) -> bool {
    field_violation(family).is_none()
}

fn field_violation(family: &SetFamily) -> Option<String> {
    if !family.contains(&Coalition::empty(family.universe)) {
        return Some("∅ is missing".into());
    }
    for s in family.iter() {
        let c = s.complement();
        if !family.contains(&c) {
            return Some(format!("complement {c} of {s} is missing"));
        }
    }
    for (i, s) in family.iter().enumerate() {
        for t in &family.sets()[i + 1..] {
            let u = s.union(t).expect("same universe");
            if !family.contains(&u) {
                return Some(format!("union {u} of {s} and {t} is missing"));
            }
        }
    }
    None
}

/// A finite field of sets together with its atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldOfSets {
    members: SetFamily,
    atoms: Vec<Coalition>,
}

impl FieldOfSets {
    /// Verifies that `family` is a field and computes its atoms.
    pub fn from_family(family: SetFamily) -> Result<Self> {
        if let Some(why) = field_violation(&family) {
            return Err(Error::NotAField(why));
        }
        let atoms: Vec<Coalition> = family.regions().into_iter().map(|r| r.set).collect();
        let expected = 1u128.checked_shl(atoms.len() as u32).unwrap_or(u128::MAX);
        if expected != family.len() as u128 {
            return Err(Error::NotAField(format!(
                "{} members but {} atoms",
                family.len(),
                atoms.len()
            )));
        }
        Ok(FieldOfSets {
            members: family,
            atoms,
        })
    }

    /// The full power set of a small finite universe.
    pub fn power_set(n: u32) -> Self {
        let atoms = (1..=n)
            .map(|p| Coalition::singleton(PlayerUniverse::Finite(n), p).expect("in range"))
            .collect();
        FieldOfSets {
            members: SetFamily::power_set(n),
            atoms,
        }
    }

    pub fn universe(&self) -> PlayerUniverse {
        self.members.universe()
    }

    pub fn members(&self) -> &SetFamily {
        &self.members
    }

    /// Minimal non-empty members, pairwise disjoint, in canonical order.
    pub fn atoms(&self) -> &[Coalition] {
        &self.atoms
    }

    pub fn contains(&self, s: &Coalition) -> bool {
        self.members.contains(s)
    }

    /// Writes `s` as a union of atoms: bit `k` set iff atom `k` lies in `s`.
    /// `None` when `s` splits some atom (so it is not a member).
    pub fn decompose(&self, s: &Coalition) -> Option<u64> {
        if s.universe() != self.universe() || self.atoms.len() > 64 {
            return None;
        }
        let mut mask = 0u64;
        for (k, atom) in self.atoms.iter().enumerate() {
            let inside = atom.intersect(s).ok()?;
            if inside == *atom {
                mask |= 1 << k;
            } else if !inside.is_empty() {
                return None;
            }
        }
        Some(mask)
    }

    /// Union of the atoms selected by `mask`.
    pub fn compose(&self, mask: u64) -> Coalition {
        let universe = self.universe();
        self.atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .fold(Coalition::empty(universe), |acc, (_, atom)| {
                acc.union(atom).expect("same universe")
            })
    }
}

impl Serialize for FieldOfSets {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("members", &self.members)?;
        map.serialize_entry("atoms", &self.atoms)?;
        map.end()
    }
}

/// Smallest field containing `family` (∅ and N are added first).
///
/// The hull of finitely many generators consists of all unions of the
/// regions they cut out, so its size is known before anything is built and
/// the cap is checked up front.
pub fn field_hull(family: &SetFamily, cap: usize) -> Result<FieldOfSets> {
    let generators = family.with_trivial();
    let atoms: Vec<Coalition> = generators.regions().into_iter().map(|r| r.set).collect();
    let members = 1u128.checked_shl(atoms.len() as u32).unwrap_or(u128::MAX);
    if members > cap as u128 || atoms.len() > 63 {
        return Err(Error::HullCapExceeded { members, cap });
    }
    let universe = family.universe();
    let field = FieldOfSets {
        members: SetFamily::empty(universe),
        atoms,
    };
    let all = (0..1u64 << field.atoms.len())
        .map(|m| field.compose(m))
        .collect::<Vec<_>>();
    Ok(FieldOfSets {
        members: SetFamily::new(universe, all)?,
        atoms: field.atoms,
    })
}

pub fn atoms_of(field: &FieldOfSets) -> &[Coalition] {
    field.atoms()
}

#[cfg(test)]
mod tests {
    use super::*;

    const F3: PlayerUniverse = PlayerUniverse::Finite(3);
    const NAT: PlayerUniverse = PlayerUniverse::Naturals;

    fn ex(u: PlayerUniverse, players: &[u32]) -> Coalition {
        Coalition::explicit(u, players.iter().copied()).unwrap()
    }

    fn cof(players: &[u32]) -> Coalition {
        Coalition::cofinite(NAT, players.iter().copied()).unwrap()
    }

    fn family(u: PlayerUniverse, sets: &[Coalition]) -> SetFamily {
        SetFamily::new(u, sets.iter().cloned()).unwrap()
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Coalition::empty(F3).complement(), ex(F3, &[1, 2, 3]));
        assert_eq!(ex(NAT, &[1]).complement(), cof(&[1]));
        let s = ex(PlayerUniverse::Finite(6), &[2, 5]);
        assert_eq!(s.complement().complement(), s);
        assert_eq!(s.complement(), ex(PlayerUniverse::Finite(6), &[1, 3, 4, 6]));
    }

    #[test]
    fn union_intersect_examples() {
        assert_eq!(
            ex(F3, &[1, 2]).union(&ex(F3, &[2, 3])).unwrap(),
            ex(F3, &[1, 2, 3])
        );
        assert_eq!(
            cof(&[1]).intersect(&ex(NAT, &[1, 2])).unwrap(),
            ex(NAT, &[2])
        );
        let s = ex(NAT, &[4]);
        assert_eq!(s.union(&Coalition::empty(NAT)).unwrap(), s);
        assert_eq!(cof(&[1, 2]).union(&ex(NAT, &[2, 5])).unwrap(), cof(&[1]));
        assert_eq!(cof(&[1, 2]).union(&cof(&[2, 3])).unwrap(), cof(&[2]));
        assert_eq!(cof(&[1]).intersect(&cof(&[2])).unwrap(), cof(&[1, 2]));
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let a = ex(F3, &[1]);
        let b = ex(PlayerUniverse::Finite(4), &[1]);
        assert!(matches!(a.union(&b), Err(Error::UniverseMismatch { .. })));
        assert!(a.intersect(&ex(NAT, &[1])).is_err());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Coalition::explicit(F3, [4]).unwrap_err().to_string(),
            "player 4 is outside the universe {1..3}"
        );
        assert_eq!(Coalition::explicit(F3, [0]), Err(Error::ZeroPlayer));
        assert_eq!(
            Coalition::cofinite(F3, [1]),
            Err(Error::CofiniteInFiniteUniverse)
        );
    }

    #[test]
    fn membership_and_representatives() {
        let c = cof(&[1, 2, 4]);
        assert!(!c.contains(1) && !c.contains(4) && c.contains(3) && c.contains(1000));
        assert_eq!(c.least_member(), Some(3));
        assert_eq!(cof(&[2]).least_member(), Some(1));
        assert_eq!(ex(F3, &[2, 3]).least_member(), Some(2));
        assert!(Coalition::grand(NAT).is_grand());
        assert!(Coalition::grand(F3).is_grand());
        assert!(!cof(&[1]).is_grand());
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![
            cof(&[]),
            ex(NAT, &[1, 2]),
            ex(NAT, &[3]),
            cof(&[1]),
            Coalition::empty(NAT),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                Coalition::empty(NAT),
                ex(NAT, &[3]),
                ex(NAT, &[1, 2]),
                cof(&[]),
                cof(&[1])
            ]
        );
    }

    #[test]
    fn is_field_examples() {
        let e = Coalition::empty(F3);
        let n = Coalition::grand(F3);
        assert!(is_field(&family(
            F3,
            &[e.clone(), ex(F3, &[1]), ex(F3, &[2, 3]), n.clone()]
        )));
        assert!(!is_field(&family(F3, &[e, ex(F3, &[1]), n])));
        assert!(is_field(&SetFamily::power_set(3)));
    }

    #[test]
    fn hull_examples() {
        let e = Coalition::empty(F3);
        let n = Coalition::grand(F3);
        let h = field_hull(
            &family(F3, &[e.clone(), ex(F3, &[1]), n.clone()]),
            DEFAULT_HULL_CAP,
        )
        .unwrap();
        assert_eq!(
            h.members(),
            &family(F3, &[e.clone(), ex(F3, &[1]), ex(F3, &[2, 3]), n.clone()])
        );
        assert_eq!(h.atoms(), &[ex(F3, &[1]), ex(F3, &[2, 3])]);

        let h = field_hull(
            &family(F3, &[ex(F3, &[1, 2]), ex(F3, &[2, 3])]),
            DEFAULT_HULL_CAP,
        )
        .unwrap();
        assert_eq!(h.members(), &SetFamily::power_set(3));
        assert_eq!(h.atoms(), &[ex(F3, &[1]), ex(F3, &[2]), ex(F3, &[3])]);

        let pw = SetFamily::power_set(3);
        assert_eq!(field_hull(&pw, DEFAULT_HULL_CAP).unwrap().members(), &pw);
    }

    #[test]
    fn hull_cap() {
        let u = PlayerUniverse::Finite(5);
        let sing: Vec<_> = (1..=5).map(|p| ex(u, &[p])).collect();
        let err = field_hull(&family(u, &sing), 16).unwrap_err();
        assert_eq!(
            err,
            Error::HullCapExceeded {
                members: 32,
                cap: 16
            }
        );
        assert!(err.is_resource_cap());
    }

    #[test]
    fn hull_over_naturals() {
        let h = field_hull(
            &family(NAT, &[ex(NAT, &[1]), ex(NAT, &[1, 2])]),
            DEFAULT_HULL_CAP,
        )
        .unwrap();
        assert_eq!(h.atoms(), &[ex(NAT, &[1]), ex(NAT, &[2]), cof(&[1, 2])]);
        assert_eq!(h.members().len(), 8);
        assert!(h.contains(&cof(&[2])));
        assert_eq!(h.decompose(&cof(&[1])), Some(0b110));
        assert_eq!(h.decompose(&ex(NAT, &[3])), None);
    }

    #[test]
    fn power_set_field_atoms() {
        let f = FieldOfSets::from_family(SetFamily::power_set(3)).unwrap();
        assert_eq!(f.atoms(), &[ex(F3, &[1]), ex(F3, &[2]), ex(F3, &[3])]);
        assert_eq!(f, FieldOfSets::power_set(3));
        let g = family(
            F3,
            &[
                Coalition::empty(F3),
                ex(F3, &[1]),
                ex(F3, &[2, 3]),
                Coalition::grand(F3),
            ],
        );
        assert_eq!(
            atoms_of(&FieldOfSets::from_family(g).unwrap()),
            &[ex(F3, &[1]), ex(F3, &[2, 3])]
        );
        assert!(FieldOfSets::from_family(family(F3, &[Coalition::empty(F3)])).is_err());
    }

    #[test]
    fn region_examples() {
        let r = regions(F3, &[ex(F3, &[1]), ex(F3, &[1, 2])]);
        let sets: Vec<_> = r.iter().map(|x| x.set.clone()).collect();
        assert_eq!(sets, vec![ex(F3, &[1]), ex(F3, &[2]), ex(F3, &[3])]);
        assert_eq!(r[0].signature, vec![true, true]);
        assert_eq!(r[1].signature, vec![false, true]);
        assert_eq!(r[2].signature, vec![false, false]);

        let r = regions(NAT, &[ex(NAT, &[1]), cof(&[1])]);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].set, ex(NAT, &[1]));
        assert_eq!(r[1].set, cof(&[1]));

        let r = regions(NAT, &[]);
        assert_eq!(r.len(), 1);
        assert!(r[0].set.is_grand());
        let r = regions(F3, &[]);
        assert_eq!(r[0].set, Coalition::grand(F3));
    }

    #[test]
    fn naturals_regions_partition_mentioned_players() {
        let r = regions(NAT, &[ex(NAT, &[1, 3]), cof(&[3, 4])]);
        let sets: Vec<_> = r.iter().map(|x| x.set.clone()).collect();
        assert_eq!(
            sets,
            vec![ex(NAT, &[1]), ex(NAT, &[3]), ex(NAT, &[4]), cof(&[1, 3, 4])]
        );
        assert_eq!(r[3].signature, vec![false, true]);
    }

    #[test]
    fn serializes() {
        assert_eq!(serde_json::to_string(&ex(F3, &[2, 1])).unwrap(), "[1,2]");
        assert_eq!(
            serde_json::to_string(&cof(&[3, 1])).unwrap(),
            r#"{"excluded":[1,3]}"#
        );
    }
}
