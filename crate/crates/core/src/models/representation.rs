//! Representations by weakening relations and their verification.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::report::Witness;

use super::cmz7::{cayley_poset, cayley_relation, cm_z7, subset};
use super::morphism::{extend_from_generators, find_embedding, ExtendError};
use super::poset::Poset;
use super::relation::Relation;
use super::wk::{build_wk_within, is_weakening, WkBound};

/// Element `e` of the source algebra is sent to `images[e]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationMap {
    pub poset: Poset,
    pub images: Vec<Relation>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("map has {found} images for an algebra of {expected} elements")]
    WrongLength { found: usize, expected: usize },
    #[error("image of element {0} is over {1} points, poset has {2}")]
    WrongCarrier(Elem, usize, usize),
    #[error("no image given for element `{0}`")]
    Missing(String),
}

/// First condition a candidate representation violates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepFailure {
    pub condition: &'static str,
    pub witness: Witness,
}

impl RepFailure {
    fn new(condition: &'static str, vars: &[(&str, Elem)]) -> Self {
        RepFailure { condition, witness: Witness::new(vars.iter().copied()) }
    }
}

/// Checks, in order: images are weakening relations, injectivity, `⊥ ↦ ∅`,
/// `⊤ ↦` an equivalence, `1 ↦ ≤`, then `∼, +, ·, ;` on all arguments.
pub fn verify_representation(
    alg: &FiniteAlgebra,
    map: &RepresentationMap,
) -> Result<Result<(), RepFailure>, MapError> {
    let m = alg.size();
    if map.images.len() != m {
        return Err(MapError::WrongLength { found: map.images.len(), expected: m });
    }
    let n = map.poset.len();
    for (e, r) in map.images.iter().enumerate() {
        if r.len() != n {
            return Err(MapError::WrongCarrier(e, r.len(), n));
        }
    }
    let h = &map.images;
    Ok((|| {
        if let Some(s) = h.iter().position(|r| !is_weakening(&map.poset, r)) {
            return Err(RepFailure::new("weakening", &[("s", s)]));
        }
        for s in 0..m {
            for t in s + 1..m {
                if h[s] == h[t] {
                    return Err(RepFailure::new("injective", &[("s", s), ("t", t)]));
                }
            }
        }
        if !h[alg.bot()].is_empty() {
            return Err(RepFailure::new("bot", &[]));
        }
        if !h[alg.top()].is_equivalence() {
            return Err(RepFailure::new("top-equivalence", &[]));
        }
        if h[alg.one()] != *map.poset.order() {
            return Err(RepFailure::new("one", &[]));
        }
        for s in 0..m {
            if h[alg.neg(s)] != h[s].converse().complement().intersection(&h[alg.top()]) {
                return Err(RepFailure::new("neg", &[("s", s)]));
            }
        }
        for s in 0..m {
            for t in 0..m {
                if h[alg.join(s, t)] != h[s].union(&h[t]) {
                    return Err(RepFailure::new("join", &[("s", s), ("t", t)]));
                }
                if h[alg.meet(s, t)] != h[s].intersection(&h[t]) {
                    return Err(RepFailure::new("meet", &[("s", s), ("t", t)]));
                }
                if h[alg.comp(s, t)] != h[s].compose(&h[t]) {
                    return Err(RepFailure::new("comp", &[("s", s), ("t", t)]));
                }
            }
        }
        Ok(())
    })())
}

/// Equivalences on the carrier of `p` that contain its order.
fn equivalences_over(p: &Poset) -> Vec<Relation> {
    let n = p.len();
    // set partitions as restricted growth strings
    let mut out = Vec::new();
    let mut block = vec![0usize; n];
    fn go(i: usize, max: usize, block: &mut Vec<usize>, p: &Poset, out: &mut Vec<Relation>) {
        let n = block.len();
        if i == n {
            let e = Relation::from_pairs(
                n,
                (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| block[x] == block[y]),
            );
            if p.order().is_subset(&e) {
                out.push(e);
            }
            return;
        }
        for b in 0..=max.min(n) {
            block[i] = b;
            go(i + 1, if b == max { max + 1 } else { max }, block, p, out);
        }
    }
    go(0, 0, &mut block, p, &mut out);
    // coarsest first: the full relation is tried before finer partitions
    out.sort_by_key(|e| std::cmp::Reverse(e.count()));
    out
}

/// A representation found by embedding into the weakening relations inside
/// some equivalence on a poset with at most `max_points` points (posets by
/// size, then enumeration order; equivalences coarsest first).
pub fn find_finite_representation(alg: &FiniteAlgebra, max_points: usize) -> Option<RepresentationMap> {
    let bound = WkBound { max_points, max_elements: 1024 };
    for n in 0..=max_points {
        for p in Poset::all_up_to_iso(n) {
            for e in equivalences_over(&p) {
                let Ok(wk) = build_wk_within(&p, &e, bound) else { continue };
                if let Some(h) = find_embedding(alg, &wk.algebra) {
                    let images = h.iter().map(|&e| wk.relation(e).clone()).collect();
                    return Some(RepresentationMap { poset: p, images });
                }
            }
        }
    }
    None
}

/// Extends `a ↦ {1,2,4}` (and `1 ↦ {0}`) to a map into `Cm(Z₇)`.
pub fn embed_into_cm_z7(alg: &FiniteAlgebra, a: Elem) -> Result<Vec<Elem>, ExtendError> {
    extend_from_generators(alg, &cm_z7(), &[(a, subset(&[1, 2, 4]))], true)
}

/// The Cayley image of an embedding into `Cm(Z₇)`.
pub fn cayley_representation(h: &[Elem]) -> RepresentationMap {
    RepresentationMap { poset: cayley_poset(), images: h.iter().map(|&s| cayley_relation(s)).collect() }
}
