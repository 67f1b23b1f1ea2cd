//! The point algebra on the atoms `id, <, >`, with atom composition read
//! off the 13 weak orderings of three points.

use itertools::Itertools;

use crate::algebra::{Elem, FiniteAlgebra};

use super::morphism::{is_closed, is_subuniverse, subalgebra};

pub const ID: u8 = 1;
pub const LT: u8 = 2;
pub const GT: u8 = 4;
pub const ATOMS: [u8; 3] = [ID, LT, GT];

fn relation_of(x: u8, y: u8) -> u8 {
    match x.cmp(&y) {
        std::cmp::Ordering::Equal => ID,
        std::cmp::Ordering::Less => LT,
        std::cmp::Ordering::Greater => GT,
    }
}

/// All configurations of three points up to order type: rank vectors
/// `(x, y, z)` whose values are an initial segment of `0, 1, 2`.
pub fn order_types() -> Vec<[u8; 3]> {
    (0..3)
        .map(|_| 0u8..3)
        .multi_cartesian_product()
        .map(|v| [v[0], v[1], v[2]])
        .filter(|v| {
            let max = *v.iter().max().unwrap();
            (0..=max).all(|r| v.contains(&r))
        })
        .collect()
}

/// Composition of two atoms: the relations between `x` and `z` realised
/// by some configuration with `x p y` and `y q z`.
pub fn compose_atoms(p: u8, q: u8) -> u8 {
    order_types()
        .into_iter()
        .filter(|&[x, y, z]| relation_of(x, y) == p && relation_of(y, z) == q)
        .fold(0, |acc, [x, _, z]| acc | relation_of(x, z))
}

fn compose_sets(s: u8, t: u8) -> u8 {
    let mut out = 0;
    for p in ATOMS.into_iter().filter(|&p| s & p != 0) {
        for q in ATOMS.into_iter().filter(|&q| t & q != 0) {
            out |= compose_atoms(p, q);
        }
    }
    out
}

fn converse(s: u8) -> u8 {
    (s & ID) | (if s & LT != 0 { GT } else { 0 }) | (if s & GT != 0 { LT } else { 0 })
}

pub const NAMES: [&str; 8] = ["0", "id", "<", "<=", ">", ">=", "<>", "T"];

/// The 8-element point algebra; element index = atom bitmask.
pub fn point_algebra() -> FiniteAlgebra {
    let m = 8;
    let leq = (0..m * m).map(|ij| (ij / m) & !(ij % m) == 0).collect();
    let join = (0..m * m).map(|ij| (ij / m) | (ij % m)).collect();
    let meet = (0..m * m).map(|ij| (ij / m) & (ij % m)).collect();
    let comp = (0..m * m).map(|ij| compose_sets((ij / m) as u8, (ij % m) as u8) as Elem).collect();
    let neg = (0..m).map(|s| (!converse(s as u8) & 7) as Elem).collect();
    let names = NAMES.iter().map(|s| s.to_string()).collect();
    FiniteAlgebra::from_trusted_tables("P", names, leq, join, meet, comp, neg, 0, 7, ID as Elem)
        .expect("point algebra")
}

/// `{∅, <, ≤, ⊤}`; closed under the operations, with unit `≤` in place of
/// `id`.
pub const S4_SUBUNIVERSE: [Elem; 4] = [0, 2, 3, 7];
/// `{∅, id, <, ≤, <∪>, ⊤}`.
pub const W61_SUBUNIVERSE: [Elem; 6] = [0, 1, 2, 3, 6, 7];

pub fn s4_subalgebra() -> FiniteAlgebra {
    let p = point_algebra();
    assert!(is_closed(&p, &S4_SUBUNIVERSE));
    subalgebra(&p, &S4_SUBUNIVERSE, "S4").expect("subalgebra")
}

pub fn w61_subalgebra() -> FiniteAlgebra {
    let p = point_algebra();
    assert!(is_subuniverse(&p, &W61_SUBUNIVERSE));
    subalgebra(&p, &W61_SUBUNIVERSE, "W6,1").expect("subalgebra")
}
