mod common;

use common::{brute_hull, family, finite};
use proptest::prelude::*;
use tugames::set_algebra::{
    field_hull, is_field, regions, Coalition, PlayerUniverse, SetFamily, DEFAULT_HULL_CAP,
};

const NAT: PlayerUniverse = PlayerUniverse::Naturals;

fn mask_of(c: &Coalition) -> u32 {
    c.members().iter().fold(0, |m, &p| m | 1 << (p - 1))
}

/// A finite or cofinite coalition over the naturals touching players 1..=8.
fn nat_coalition() -> impl Strategy<Value = Coalition> {
    (
        any::<bool>(),
        proptest::collection::btree_set(1u32..=8, 0..5),
    )
        .prop_map(|(cofinite, players)| {
            if cofinite {
                Coalition::cofinite(NAT, players).unwrap()
            } else {
                Coalition::explicit(NAT, players).unwrap()
            }
        })
}

fn finite_coalition(n: u32) -> impl Strategy<Value = Coalition> {
    (0u32..1 << n).prop_map(move |m| finite(n, m))
}

fn any_coalition() -> impl Strategy<Value = Coalition> {
    prop_oneof![nat_coalition(), finite_coalition(6)]
}

fn triple() -> impl Strategy<Value = (Coalition, Coalition, Coalition)> {
    prop_oneof![
        (nat_coalition(), nat_coalition(), nat_coalition()),
        (
            finite_coalition(6),
            finite_coalition(6),
            finite_coalition(6)
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hull_matches_brute_force(n in 1u32..=4, gens in proptest::collection::vec(0u32..16, 0..=4)) {
        let gens: Vec<u32> = gens.into_iter().map(|g| g & ((1 << n) - 1)).collect();
        let hull = field_hull(&family(n, &gens), DEFAULT_HULL_CAP).unwrap();
        let got: u32 = hull.members().iter().fold(0, |fam, s| fam | 1 << mask_of(s));
        prop_assert_eq!(got, brute_hull(n, &gens));
        prop_assert!(is_field(hull.members()));
    }

    #[test]
    fn atoms_partition_and_generate(n in 1u32..=6, gens in proptest::collection::vec(0u32..64, 0..=4)) {
        let gens: Vec<u32> = gens.into_iter().map(|g| g & ((1 << n) - 1)).collect();
        let hull = field_hull(&family(n, &gens), DEFAULT_HULL_CAP).unwrap();
        let atoms: Vec<u32> = hull.atoms().iter().map(mask_of).collect();
        prop_assert!(atoms.iter().all(|&a| a != 0));
        prop_assert_eq!(atoms.iter().fold(0, |acc, a| acc | a), (1 << n) - 1);
        prop_assert_eq!(atoms.iter().map(|a| a.count_ones()).sum::<u32>(), n);
        prop_assert_eq!(hull.members().len(), 1usize << atoms.len());
        for member in hull.members().iter() {
            let m = mask_of(member);
            let union = atoms.iter().filter(|&&a| a & m == a).fold(0, |acc, a| acc | a);
            prop_assert_eq!(union, m);
        }
    }

    #[test]
    fn regions_partition_the_naturals(gens in proptest::collection::vec(nat_coalition(), 0..=5)) {
        let found = regions(NAT, &gens);
        let mut signatures: Vec<&Vec<bool>> = found.iter().map(|r| &r.signature).collect();
        signatures.sort();
        signatures.dedup();
        prop_assert_eq!(signatures.len(), found.len());
        prop_assert!(found.iter().filter(|r| r.set.is_cofinite()).count() <= 1);
        // Players 1..=8 are the only ones mentioned; 9 stands for everything after.
        for player in 1..=9u32 {
            let holders: Vec<_> = found.iter().filter(|r| r.set.contains(player)).collect();
            prop_assert_eq!(holders.len(), 1);
            let expected: Vec<bool> = gens.iter().map(|g| g.contains(player)).collect();
            prop_assert_eq!(&holders[0].signature, &expected);
        }
    }

    #[test]
    fn regions_partition_finite_universes(n in 1u32..=6, gens in proptest::collection::vec(0u32..64, 0..=5)) {
        let gens: Vec<Coalition> = gens.into_iter().map(|g| finite(n, g & ((1 << n) - 1))).collect();
        let found = regions(PlayerUniverse::Finite(n), &gens);
        for player in 1..=n {
            prop_assert_eq!(found.iter().filter(|r| r.set.contains(player)).count(), 1);
        }
        prop_assert!(found.iter().all(|r| !r.set.is_empty()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn complement_is_an_involution(s in any_coalition()) {
        prop_assert_eq!(s.complement().complement(), s.clone());
        prop_assert!(s.intersect(&s.complement()).unwrap().is_empty());
        prop_assert!(s.union(&s.complement()).unwrap().is_grand());
    }

    #[test]
    fn lattice_laws((a, b, c) in triple()) {
        prop_assert_eq!(a.union(&b).unwrap(), b.union(&a).unwrap());
        prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
        prop_assert_eq!(a.union(&b).unwrap().union(&c).unwrap(), a.union(&b.union(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.intersect(&b).unwrap().intersect(&c).unwrap(),
            a.intersect(&b.intersect(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.union(&a).unwrap(), a.clone());
        prop_assert_eq!(a.intersect(&a).unwrap(), a.clone());
        for p in 1..=9u32 {
            prop_assert_eq!(a.union(&b).unwrap().contains(p), a.contains(p) || b.contains(p));
            prop_assert_eq!(a.intersect(&b).unwrap().contains(p), a.contains(p) && b.contains(p));
        }
    }
}

#[test]
fn mixed_universes_are_rejected() {
    let a = finite(3, 1);
    let b = Coalition::explicit(NAT, [1]).unwrap();
    assert!(a.union(&b).is_err());
    assert!(SetFamily::new(NAT, [a]).is_err());
}
