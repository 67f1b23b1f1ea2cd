//! Products, subalgebras, homomorphisms and embedding search.

use serde::Serialize;

use crate::algebra::{AlgebraError, Elem, FiniteAlgebra};
use crate::report::Witness;

/// First operation a map fails to preserve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomViolation {
    pub operation: &'static str,
    pub witness: Witness,
}

fn violation(op: &'static str, vars: &[(&str, Elem)]) -> HomViolation {
    HomViolation { operation: op, witness: Witness::new(vars.iter().copied()) }
}

/// Checks that `h: A → B` preserves `⊥, ⊤, 1, ∼, +, ·, ;`.
pub fn check_homomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra, h: &[Elem]) -> Result<(), HomViolation> {
    assert_eq!(h.len(), a.size());
    if h[a.bot()] != b.bot() {
        return Err(violation("bot", &[]));
    }
    if h[a.top()] != b.top() {
        return Err(violation("top", &[]));
    }
    if h[a.one()] != b.one() {
        return Err(violation("one", &[]));
    }
    for s in 0..a.size() {
        if h[a.neg(s)] != b.neg(h[s]) {
            return Err(violation("neg", &[("s", s)]));
        }
    }
    for s in 0..a.size() {
        for t in 0..a.size() {
            if h[a.join(s, t)] != b.join(h[s], h[t]) {
                return Err(violation("join", &[("s", s), ("t", t)]));
            }
            if h[a.meet(s, t)] != b.meet(h[s], h[t]) {
                return Err(violation("meet", &[("s", s), ("t", t)]));
            }
            if h[a.comp(s, t)] != b.comp(h[s], h[t]) {
                return Err(violation("comp", &[("s", s), ("t", t)]));
            }
        }
    }
    Ok(())
}

pub fn is_homomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra, h: &[Elem]) -> bool {
    check_homomorphism(a, b, h).is_ok()
}

/// Componentwise product; element `(i, j)` has index `i * |B| + j`.
pub fn direct_product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    let (ma, mb) = (a.size(), b.size());
    let m = ma * mb;
    let pair = |e: usize| (e / mb, e % mb);
    let mk = |i: usize, j: usize| i * mb + j;
    let table = |f: &dyn Fn((usize, usize), (usize, usize)) -> usize| -> Vec<usize> {
        (0..m * m).map(|ij| f(pair(ij / m), pair(ij % m))).collect()
    };
    let leq = (0..m * m)
        .map(|ij| {
            let (s, t) = (pair(ij / m), pair(ij % m));
            a.leq(s.0, t.0) && b.leq(s.1, t.1)
        })
        .collect();
    let join = table(&|s, t| mk(a.join(s.0, t.0), b.join(s.1, t.1)));
    let meet = table(&|s, t| mk(a.meet(s.0, t.0), b.meet(s.1, t.1)));
    let comp = table(&|s, t| mk(a.comp(s.0, t.0), b.comp(s.1, t.1)));
    let neg = (0..m).map(|e| mk(a.neg(pair(e).0), b.neg(pair(e).1))).collect();
    let names = (0..m)
        .map(|e| format!("({},{})", a.element_name(pair(e).0), b.element_name(pair(e).1)))
        .collect();
    FiniteAlgebra::from_trusted_tables(
        format!("{}x{}", a.name(), b.name()),
        names,
        leq,
        join,
        meet,
        comp,
        neg,
        mk(a.bot(), b.bot()),
        mk(a.top(), b.top()),
        mk(a.one(), b.one()),
    )
    .expect("product of valid algebras")
}

/// Whether `set` contains the constants and is closed under the operations.
pub fn is_subuniverse(a: &FiniteAlgebra, set: &[Elem]) -> bool {
    set.contains(&a.one()) && is_closed(a, set)
}

/// Closure under `⊥, ⊤, ∼, +, ·, ;` without requiring the unit; such a set
/// may carry its own unit (see [`unit_of`]).
pub fn is_closed(a: &FiniteAlgebra, set: &[Elem]) -> bool {
    let mut member = vec![false; a.size()];
    for &s in set {
        member[s] = true;
    }
    member[a.bot()]
        && member[a.top()]
        && set.iter().all(|&s| member[a.neg(s)])
        && set.iter().all(|&s| {
            set.iter().all(|&t| member[a.join(s, t)] && member[a.meet(s, t)] && member[a.comp(s, t)])
        })
}

/// The element of `set` that is a two-sided unit for `;` on `set`.
pub fn unit_of(a: &FiniteAlgebra, set: &[Elem]) -> Option<Elem> {
    set.iter().copied().find(|&e| set.iter().all(|&s| a.comp(e, s) == s && a.comp(s, e) == s))
}

/// Algebra on a closed set with its own unit, keeping element names and
/// the given order. For a subuniverse the unit is that of `a`.
pub fn subalgebra(a: &FiniteAlgebra, set: &[Elem], name: &str) -> Result<FiniteAlgebra, AlgebraError> {
    assert!(is_closed(a, set), "set is not closed under the operations");
    let one = if set.contains(&a.one()) { a.one() } else { unit_of(a, set).expect("set has a unit") };
    let m = set.len();
    let pos = |e: Elem| set.iter().position(|&x| x == e).expect("closed");
    let mut leq = vec![false; m * m];
    let mut join = vec![0; m * m];
    let mut meet = vec![0; m * m];
    let mut comp = vec![0; m * m];
    for (i, &s) in set.iter().enumerate() {
        for (j, &t) in set.iter().enumerate() {
            leq[i * m + j] = a.leq(s, t);
            join[i * m + j] = pos(a.join(s, t));
            meet[i * m + j] = pos(a.meet(s, t));
            comp[i * m + j] = pos(a.comp(s, t));
        }
    }
    let neg = set.iter().map(|&s| pos(a.neg(s))).collect();
    let names = set.iter().map(|&s| a.element_name(s).to_string()).collect();
    FiniteAlgebra::from_trusted_tables(
        name,
        names,
        leq,
        join,
        meet,
        comp,
        neg,
        pos(a.bot()),
        pos(a.top()),
        pos(one),
    )
}

/// Subuniverse generated by `gens`.
pub fn generated(a: &FiniteAlgebra, gens: &[Elem]) -> Vec<Elem> {
    let mut member = vec![false; a.size()];
    let mut items = Vec::new();
    let push = |s: Elem, member: &mut Vec<bool>, items: &mut Vec<Elem>| {
        if !member[s] {
            member[s] = true;
            items.push(s);
        }
    };
    for s in [a.bot(), a.top(), a.one()].into_iter().chain(gens.iter().copied()) {
        push(s, &mut member, &mut items);
    }
    let mut i = 0;
    while i < items.len() {
        let s = items[i];
        push(a.neg(s), &mut member, &mut items);
        for j in 0..=i {
            let t = items[j];
            for u in [a.join(s, t), a.meet(s, t), a.comp(s, t), a.comp(t, s)] {
                push(u, &mut member, &mut items);
            }
        }
        i += 1;
    }
    items.sort_unstable();
    items
}

/// A small generating set, chosen greedily in index order.
pub fn generating_set(a: &FiniteAlgebra) -> Vec<Elem> {
    let mut gens = Vec::new();
    let mut covered = generated(a, &gens);
    while covered.len() < a.size() {
        let next = (0..a.size()).find(|s| covered.binary_search(s).is_err()).expect("missing element");
        gens.push(next);
        covered = generated(a, &gens);
    }
    gens
}

#[derive(Debug, PartialEq, Eq)]
pub enum ExtendError {
    /// Two derivations of the same source element disagree.
    Conflict(Elem),
    /// Two source elements map to the same target (only with `injective`).
    NotInjective(Elem, Elem),
    /// The assignments do not generate the whole source.
    Incomplete,
}

/// Extends a partial assignment on generators to the generated
/// subalgebra by closing under the operations.
pub fn extend_from_generators(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    assignments: &[(Elem, Elem)],
    injective: bool,
) -> Result<Vec<Elem>, ExtendError> {
    let mut h: Vec<Option<Elem>> = vec![None; a.size()];
    let mut preimage: Vec<Option<Elem>> = vec![None; b.size()];
    let mut items = Vec::new();
    let mut assign = |s: Elem, t: Elem, h: &mut Vec<Option<Elem>>, items: &mut Vec<Elem>| -> Result<(), ExtendError> {
        match h[s] {
            Some(u) if u == t => Ok(()),
            Some(_) => Err(ExtendError::Conflict(s)),
            None => {
                if injective {
                    if let Some(p) = preimage[t] {
                        return Err(ExtendError::NotInjective(p, s));
                    }
                    preimage[t] = Some(s);
                }
                h[s] = Some(t);
                items.push(s);
                Ok(())
            }
        }
    };
    assign(a.bot(), b.bot(), &mut h, &mut items)?;
    assign(a.top(), b.top(), &mut h, &mut items)?;
    assign(a.one(), b.one(), &mut h, &mut items)?;
    for &(s, t) in assignments {
        assign(s, t, &mut h, &mut items)?;
    }
    let mut i = 0;
    while i < items.len() {
        let s = items[i];
        let hs = h[s].unwrap();
        assign(a.neg(s), b.neg(hs), &mut h, &mut items)?;
        for j in 0..=i {
            let t = items[j];
            let ht = h[t].unwrap();
            assign(a.join(s, t), b.join(hs, ht), &mut h, &mut items)?;
            assign(a.meet(s, t), b.meet(hs, ht), &mut h, &mut items)?;
            assign(a.comp(s, t), b.comp(hs, ht), &mut h, &mut items)?;
            assign(a.comp(t, s), b.comp(ht, hs), &mut h, &mut items)?;
        }
        i += 1;
    }
    h.into_iter().collect::<Option<Vec<_>>>().ok_or(ExtendError::Incomplete)
}

/// Equalities among terms in one variable that injective homomorphisms
/// preserve and reflect; used to prune embedding candidates.
fn profile(a: &FiniteAlgebra, s: Elem) -> [bool; 8] {
    let c = a.comp(s, s);
    [
        c == s,
        a.neg(s) == s,
        a.leq(s, a.one()),
        a.leq(a.one(), s),
        a.leq(s, a.zero()),
        a.leq(a.zero(), s),
        a.leq(s, a.neg(s)),
        a.leq(c, s),
    ]
}

/// Searches for an injective homomorphism `A → B`, trying generator images
/// in index order; the first embedding found is returned.
pub fn find_embedding(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Vec<Elem>> {
    if a.size() > b.size() {
        return None;
    }
    let gens = generating_set(a);
    let candidates: Vec<Vec<Elem>> = gens
        .iter()
        .map(|&g| {
            let p = profile(a, g);
            (0..b.size()).filter(|&t| profile(b, t) == p).collect()
        })
        .collect();
    let mut chosen = Vec::with_capacity(gens.len());
    search(a, b, &gens, &candidates, &mut chosen)
}

fn search(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    gens: &[Elem],
    candidates: &[Vec<Elem>],
    chosen: &mut Vec<(Elem, Elem)>,
) -> Option<Vec<Elem>> {
    let depth = chosen.len();
    if depth == gens.len() {
        let h = extend_from_generators(a, b, chosen, true).ok()?;
        return check_homomorphism(a, b, &h).is_ok().then_some(h);
    }
    for &t in &candidates[depth] {
        chosen.push((gens[depth], t));
        // partial consistency: the generated part must extend injectively
        let ok = match extend_from_generators(a, b, chosen, true) {
            Ok(_) | Err(ExtendError::Incomplete) => true,
            Err(_) => false,
        };
        if ok {
            if let Some(h) = search(a, b, gens, candidates, chosen) {
                return Some(h);
            }
        }
        chosen.pop();
    }
    None
}

/// Isomorphism by embedding search between equal-size algebras.
pub fn are_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
    a.size() == b.size() && find_embedding(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RawAlgebra;

    fn s4() -> FiniteAlgebra {
        FiniteAlgebra::new(RawAlgebra {
            name: "S4".into(),
            elements: vec!["0".into(), "<".into(), "<=".into(), "T".into()],
            leq: vec![[0, 1], [1, 2], [2, 3], [0, 2], [0, 3], [1, 3]],
            comp: vec![vec![0, 0, 0, 0], vec![0, 1, 1, 3], vec![0, 1, 2, 3], vec![0, 3, 3, 3]],
            neg: vec![3, 2, 1, 0],
            one: 2,
            bot: 0,
            top: 3,
        })
        .unwrap()
    }

    #[test]
    fn identity_embedding() {
        let a = s4();
        let h = find_embedding(&a, &a).unwrap();
        assert_eq!(h, vec![0, 1, 2, 3]);
        assert!(are_isomorphic(&a, &a));
    }

    #[test]
    fn product_projections_are_homomorphisms() {
        let a = s4();
        let p = direct_product(&a, &a);
        assert_eq!(p.size(), 16);
        let first: Vec<Elem> = (0..16).map(|e| e / 4).collect();
        let second: Vec<Elem> = (0..16).map(|e| e % 4).collect();
        assert!(is_homomorphism(&p, &a, &first));
        assert!(is_homomorphism(&p, &a, &second));
        let diag: Vec<Elem> = (0..4).map(|e| e * 4 + e).collect();
        assert!(is_homomorphism(&a, &p, &diag));
    }

    #[test]
    fn constant_map_is_rejected() {
        let a = s4();
        let err = check_homomorphism(&a, &a, &[0, 0, 0, 0]).unwrap_err();
        assert_eq!(err.operation, "top");
    }

    #[test]
    fn generated_subuniverse() {
        let a = s4();
        assert_eq!(generated(&a, &[]), vec![0, 1, 2, 3]);
        assert!(generating_set(&a).is_empty());
        assert!(is_subuniverse(&a, &[0, 1, 2, 3]));
        assert!(!is_subuniverse(&a, &[0, 2, 3]));
    }
}
