//! Complex algebra of the cyclic group `Z₇` and its Cayley representation.

use crate::algebra::{Elem, FiniteAlgebra};

use super::poset::Poset;
use super::relation::Relation;

const N: usize = 7;
const FULL: usize = (1 << N) - 1;

fn sumset(s: usize, t: usize) -> usize {
    let mut out = 0;
    for i in (0..N).filter(|i| s >> i & 1 == 1) {
        for j in (0..N).filter(|j| t >> j & 1 == 1) {
            out |= 1 << ((i + j) % N);
        }
    }
    out
}

fn negate(s: usize) -> usize {
    (0..N).filter(|i| s >> i & 1 == 1).fold(0, |acc, i| acc | 1 << ((N - i) % N))
}

/// Subset of `Z₇` as an element index (the bitmask itself).
pub fn subset(items: &[usize]) -> Elem {
    items.iter().fold(0, |acc, &i| acc | 1 << (i % N))
}

fn name(s: usize) -> String {
    let items: Vec<String> = (0..N).filter(|i| s >> i & 1 == 1).map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// `Cm(Z₇)`: subsets under `∪, ∩`, sumset composition, unit `{0}` and
/// `∼S = Z₇ ∖ (−S)`.
pub fn cm_z7() -> FiniteAlgebra {
    let m = 1 << N;
    let leq = (0..m * m).map(|ij| (ij / m) & !(ij % m) == 0).collect();
    let join = (0..m * m).map(|ij| (ij / m) | (ij % m)).collect();
    let meet = (0..m * m).map(|ij| (ij / m) & (ij % m)).collect();
    let comp = (0..m * m).map(|ij| sumset(ij / m, ij % m)).collect();
    let neg = (0..m).map(|s| !negate(s) & FULL).collect();
    let names = (0..m).map(name).collect();
    FiniteAlgebra::from_trusted_tables("Cm(Z7)", names, leq, join, meet, comp, neg, 0, FULL, 1)
        .expect("complex algebra")
}

/// `S ↦ {(x, y) | y − x ∈ S}` over the 7-point antichain.
pub fn cayley_relation(s: Elem) -> Relation {
    Relation::from_pairs(
        N,
        (0..N).flat_map(|x| (0..N).map(move |y| (x, y))).filter(|&(x, y)| s >> ((y + N - x) % N) & 1 == 1),
    )
}

pub fn cayley_poset() -> Poset {
    Poset::antichain(N)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::validate_algebra;

    #[test]
    fn unit_and_involution() {
        let a = cm_z7();
        for s in 0..a.size() {
            assert_eq!(a.comp(1, s), s);
            assert_eq!(a.neg(a.neg(s)), s);
        }
        assert!(validate_algebra(&a.to_raw()).unwrap().passed());
    }

    #[test]
    fn quadratic_residues() {
        let a = cm_z7();
        let q = subset(&[1, 2, 4]);
        // brute-force sumset of {1,2,4} with itself
        let mut expect = 0;
        for x in [1, 2, 4] {
            for y in [1, 2, 4] {
                expect |= 1 << ((x + y) % 7);
            }
        }
        assert_eq!(a.comp(q, q), expect);
        assert_eq!(expect, subset(&[1, 2, 3, 4, 5, 6]));
    }

    #[test]
    fn cayley_map_preserves_composition() {
        let a = cm_z7();
        for s in (0..128).step_by(5) {
            for t in (0..128).step_by(3) {
                assert_eq!(cayley_relation(s).compose(&cayley_relation(t)), cayley_relation(a.comp(s, t)));
            }
        }
    }
}
