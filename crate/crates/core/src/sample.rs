//! Seeded random generators for algebras, maps, towers and groups.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::abelian::{FgAbGroup, GroupElement};
use crate::diffcalc::{ActionAlgebra, GValuedMap};

/// Random algebra with `1 ≤ |S| ≤ max_s`, `1 ≤ |T| ≤ max_t`.
pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, max_s: usize, max_t: usize) -> ActionAlgebra {
    let s = rng.gen_range(1..=max_s);
    let t = rng.gen_range(1..=max_t);
    random_algebra_sized(rng, s, t)
}

/// Random table on fixed sizes; the zero of `T` is chosen at random and
/// its column is forced to the identity.
pub fn random_algebra_sized<R: Rng + ?Sized>(rng: &mut R, s: usize, t: usize) -> ActionAlgebra {
    let zero = rng.gen_range(0..t);
    let mut table = Vec::with_capacity(s * t);
    for x in 0..s {
        for y in 0..t {
            table.push(if y == zero { x } else { rng.gen_range(0..s) });
        }
    }
    ActionAlgebra::new(s, t, table, zero).expect("right zero enforced")
}

/// Uniform element of a finite group.
pub fn random_element<R: Rng + ?Sized>(rng: &mut R, group: &FgAbGroup) -> GroupElement {
    let coords = group
        .orders()
        .iter()
        .map(|q| {
            let q = u64::try_from(q).expect("finite enumerable group");
            BigInt::from(rng.gen_range(0..q))
        })
        .collect();
    group.element(coords).unwrap()
}

pub fn random_map<R: Rng + ?Sized>(rng: &mut R, algebra: &ActionAlgebra, group: &FgAbGroup) -> GValuedMap {
    let table = (0..algebra.s_size()).map(|_| random_element(rng, group)).collect();
    GValuedMap::new(algebra.clone(), group.clone(), table).unwrap()
}

/// Random finite group with summands drawn from `choices`.
pub fn random_group<R: Rng + ?Sized>(rng: &mut R, choices: &[u64], max_rank: usize) -> FgAbGroup {
    let rank = rng.gen_range(0..=max_rank);
    FgAbGroup::new((0..rank).map(|_| *choices.choose(rng).unwrap())).unwrap()
}

/// Random tower with ground of order at most 4, at most two layers and
/// layer orders drawn from `qs`.
pub fn random_tower<R: Rng + ?Sized>(rng: &mut R, qs: &[u64]) -> crate::tower::TowerModel {
    const GROUNDS: [&[u64]; 5] = [&[], &[2], &[3], &[4], &[2, 2]];
    let ground = FgAbGroup::new(GROUNDS.choose(rng).unwrap().iter().copied()).unwrap();
    let mut size = ground.enumerable_size().unwrap();
    let mut layers = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let q = *qs.choose(rng).unwrap();
        let kappa = (0..size).map(|_| rng.gen_range(0..q)).collect();
        layers.push((q, kappa, None));
        size *= q as usize;
    }
    crate::tower::TowerModel::new(ground, layers).expect("random tower is valid")
}
