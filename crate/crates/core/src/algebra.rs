//! Finite bounded cyclic involutive unital dℓ-magmas given by full tables.
//!
//! Elements are indices `0..m`. The order `leq` is the source of truth:
//! join and meet are derived from it once at load time and cached, and
//! `zero` is always derived as `neg[one]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{AxiomReport, Witness};

pub type Elem = usize;

/// On-disk shape of an algebra file. `leq` lists pairs `[i, j]` with
/// `i ≤ j`; reflexive pairs may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAlgebra {
    pub name: String,
    pub elements: Vec<String>,
    pub leq: Vec<[usize; 2]>,
    pub comp: Vec<Vec<usize>>,
    pub neg: Vec<usize>,
    pub one: usize,
    pub bot: usize,
    pub top: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MalformedError {
    #[error("algebra has no elements")]
    Empty,
    #[error("table `{table}` has length {found}, expected {expected}")]
    Ragged { table: &'static str, found: usize, expected: usize },
    #[error("index {index} in `{table}` is out of range (m = {m})")]
    OutOfRange { table: &'static str, index: usize, m: usize },
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("malformed algebra: {0}")]
    Malformed(#[from] MalformedError),
    #[error("axiom `{label}` fails: {witness:?}")]
    Axiom { label: String, witness: Witness },
    #[error("hat of join-irreducible {0} is not join-irreducible")]
    NonIrreducibleResult(Elem),
}

/// A join-irreducible element, certified join-prime at load time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct JoinIrreducible {
    pub index: Elem,
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    name: String,
    elements: Vec<String>,
    m: usize,
    leq: Vec<bool>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    comp: Vec<Elem>,
    neg: Vec<Elem>,
    bot: Elem,
    top: Elem,
    one: Elem,
    zero: Elem,
    jis: Vec<JoinIrreducible>,
}

pub const BASE_AXIOMS: [&str; 9] = [
    "poset",
    "bounds",
    "lattice",
    "distributivity",
    "additivity",
    "bot-annihilation",
    "unit",
    "involution",
    "de-morgan",
];

fn check_shape(raw: &RawAlgebra) -> Result<(), MalformedError> {
    let m = raw.elements.len();
    if m == 0 {
        return Err(MalformedError::Empty);
    }
    let mut seen = std::collections::HashSet::new();
    for e in &raw.elements {
        if !seen.insert(e) {
            return Err(MalformedError::DuplicateName(e.clone()));
        }
    }
    let range = |table: &'static str, index: usize| {
        if index >= m {
            Err(MalformedError::OutOfRange { table, index, m })
        } else {
            Ok(())
        }
    };
    if raw.comp.len() != m {
        return Err(MalformedError::Ragged { table: "comp", found: raw.comp.len(), expected: m });
    }
    for row in &raw.comp {
        if row.len() != m {
            return Err(MalformedError::Ragged { table: "comp", found: row.len(), expected: m });
        }
        for &v in row {
            range("comp", v)?;
        }
    }
    if raw.neg.len() != m {
        return Err(MalformedError::Ragged { table: "neg", found: raw.neg.len(), expected: m });
    }
    for &v in &raw.neg {
        range("neg", v)?;
    }
    for &[i, j] in &raw.leq {
        range("leq", i)?;
        range("leq", j)?;
    }
    range("one", raw.one)?;
    range("bot", raw.bot)?;
    range("top", raw.top)?;
    Ok(())
}

/// Least upper bound / greatest lower bound tables derived from an order.
/// Returns the first pair lacking a bound.
fn bound_tables(m: usize, leq: &[bool]) -> Result<(Vec<Elem>, Vec<Elem>), Witness> {
    let le = |a: usize, b: usize| leq[a * m + b];
    let mut join = vec![0; m * m];
    let mut meet = vec![0; m * m];
    for s in 0..m {
        for t in 0..m {
            let ub = (0..m).filter(|&u| le(s, u) && le(t, u)).find(|&u| {
                (0..m).all(|v| !(le(s, v) && le(t, v)) || le(u, v))
            });
            let lb = (0..m).filter(|&u| le(u, s) && le(u, t)).find(|&u| {
                (0..m).all(|v| !(le(v, s) && le(v, t)) || le(v, u))
            });
            match (ub, lb) {
                (Some(u), Some(l)) => {
                    join[s * m + t] = u;
                    meet[s * m + t] = l;
                }
                _ => return Err(Witness::new([("s", s), ("t", t)])),
            }
        }
    }
    Ok((join, meet))
}

/// Checks the axioms of a bounded cyclic involutive unital dℓ-magma on raw
/// tables, stopping at the first failing axiom.
pub fn validate_algebra(raw: &RawAlgebra) -> Result<AxiomReport, MalformedError> {
    check_shape(raw)?;
    let m = raw.elements.len();
    let mut leq = vec![false; m * m];
    for i in 0..m {
        leq[i * m + i] = true;
    }
    for &[i, j] in &raw.leq {
        leq[i * m + j] = true;
    }
    let comp: Vec<Elem> = raw.comp.iter().flatten().copied().collect();
    Ok(validate_tables(m, &leq, &comp, &raw.neg, raw.bot, raw.top, raw.one).0)
}

type Tables = (Vec<Elem>, Vec<Elem>);

fn validate_tables(
    m: usize,
    leq: &[bool],
    comp: &[Elem],
    neg: &[Elem],
    bot: Elem,
    top: Elem,
    one: Elem,
) -> (AxiomReport, Option<Tables>) {
    let mut report = AxiomReport::new();
    let le = |a: usize, b: usize| leq[a * m + b];

    // poset
    let poset = (|| {
        for a in 0..m {
            for b in 0..m {
                if a != b && le(a, b) && le(b, a) {
                    return Some(Witness::new([("a", a), ("b", b)]));
                }
                for c in 0..m {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        return Some(Witness::new([("a", a), ("b", b), ("c", c)]));
                    }
                }
            }
        }
        None
    })();
    report.record("poset", poset.clone());
    if poset.is_some() {
        return (report, None);
    }

    let bounds = (0..m)
        .find(|&s| !le(bot, s) || !le(s, top))
        .map(|s| Witness::new([("bot", bot), ("top", top), ("s", s)]));
    report.record("bounds", bounds.clone());
    if bounds.is_some() {
        return (report, None);
    }

    let (join, meet) = match bound_tables(m, leq) {
        Ok(t) => {
            report.pass("lattice");
            t
        }
        Err(w) => {
            report.fail("lattice", w);
            return (report, None);
        }
    };
    let j = |a: usize, b: usize| join[a * m + b];
    let mt = |a: usize, b: usize| meet[a * m + b];
    let c = |a: usize, b: usize| comp[a * m + b];

    let distributivity = (|| {
        for s in 0..m {
            for t in 0..m {
                for u in 0..m {
                    if mt(s, j(t, u)) != j(mt(s, t), mt(s, u)) {
                        return Some(Witness::new([("s", s), ("t", t), ("u", u)]));
                    }
                }
            }
        }
        None
    })();
    report.record("distributivity", distributivity.clone());
    if distributivity.is_some() {
        return (report, None);
    }

    // (s+t);(u+v) = s;u+s;v+t;u+t;v is equivalent to additivity in each
    // argument separately, which is what is checked here.
    let additivity = (|| {
        for s in 0..m {
            for t in 0..m {
                for u in 0..m {
                    if c(j(s, t), u) != j(c(s, u), c(t, u)) {
                        return Some(Witness::new([("s", s), ("t", t), ("u", u)]));
                    }
                    if c(u, j(s, t)) != j(c(u, s), c(u, t)) {
                        return Some(Witness::new([("s", s), ("t", t), ("u", u)]));
                    }
                }
            }
        }
        None
    })();
    report.record("additivity", additivity.clone());
    if additivity.is_some() {
        return (report, None);
    }

    let annihilation =
        (0..m).find(|&s| c(s, bot) != bot || c(bot, s) != bot).map(|s| Witness::new([("s", s)]));
    report.record("bot-annihilation", annihilation.clone());
    if annihilation.is_some() {
        return (report, None);
    }

    let unit = (0..m).find(|&s| c(s, one) != s || c(one, s) != s).map(|s| Witness::new([("s", s)]));
    report.record("unit", unit.clone());
    if unit.is_some() {
        return (report, None);
    }

    let involution = (0..m).find(|&s| neg[neg[s]] != s).map(|s| Witness::new([("s", s)]));
    report.record("involution", involution.clone());
    if involution.is_some() {
        return (report, None);
    }

    let de_morgan = (|| {
        for s in 0..m {
            for t in 0..m {
                if neg[mt(s, t)] != j(neg[s], neg[t]) {
                    return Some(Witness::new([("s", s), ("t", t)]));
                }
            }
        }
        None
    })();
    report.record("de-morgan", de_morgan.clone());
    if de_morgan.is_some() {
        return (report, None);
    }
    (report, Some((join, meet)))
}

impl FiniteAlgebra {
    /// Loads and validates raw tables.
    pub fn new(raw: RawAlgebra) -> Result<Self, AlgebraError> {
        check_shape(&raw)?;
        let m = raw.elements.len();
        let mut leq = vec![false; m * m];
        for i in 0..m {
            leq[i * m + i] = true;
        }
        for &[i, j] in &raw.leq {
            leq[i * m + j] = true;
        }
        let comp: Vec<Elem> = raw.comp.iter().flatten().copied().collect();
        let (report, tables) =
            validate_tables(m, &leq, &comp, &raw.neg, raw.bot, raw.top, raw.one);
        let (join, meet) = match tables {
            Some(t) => t,
            None => {
                let (label, witness) = report.first_failure().expect("failure recorded");
                return Err(AlgebraError::Axiom { label: label.to_string(), witness: witness.clone() });
            }
        };
        Self::assemble(raw.name, raw.elements, leq, join, meet, comp, raw.neg, raw.bot, raw.top, raw.one)
    }

    /// Builds an algebra from tables produced by a trusted construction
    /// (frames, relation algebras, products). The base axioms are not
    /// re-checked here; `validate_algebra(&a.to_raw())` does that.
    #[allow(clippy::too_many_arguments)]
    pub fn from_trusted_tables(
        name: impl Into<String>,
        elements: Vec<String>,
        leq: Vec<bool>,
        join: Vec<Elem>,
        meet: Vec<Elem>,
        comp: Vec<Elem>,
        neg: Vec<Elem>,
        bot: Elem,
        top: Elem,
        one: Elem,
    ) -> Result<Self, AlgebraError> {
        Self::assemble(name.into(), elements, leq, join, meet, comp, neg, bot, top, one)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        name: String,
        elements: Vec<String>,
        leq: Vec<bool>,
        join: Vec<Elem>,
        meet: Vec<Elem>,
        comp: Vec<Elem>,
        neg: Vec<Elem>,
        bot: Elem,
        top: Elem,
        one: Elem,
    ) -> Result<Self, AlgebraError> {
        let m = elements.len();
        let zero = neg[one];
        let mut alg = FiniteAlgebra {
            name,
            elements,
            m,
            leq,
            join,
            meet,
            comp,
            neg,
            bot,
            top,
            one,
            zero,
            jis: Vec::new(),
        };
        alg.jis = alg.compute_join_irreducibles();
        for ji in alg.jis.clone() {
            alg.hat(ji)?;
        }
        Ok(alg)
    }

    fn compute_join_irreducibles(&self) -> Vec<JoinIrreducible> {
        let m = self.m;
        (0..m)
            .filter(|&a| {
                if a == self.bot {
                    return false;
                }
                let below = (0..m)
                    .filter(|&s| s != a && self.leq(s, a))
                    .fold(self.bot, |acc, s| self.join(acc, s));
                below != a
            })
            .map(|a| {
                let prime = (0..m).all(|b| {
                    (0..m).all(|c| !self.leq(a, self.join(b, c)) || self.leq(a, b) || self.leq(a, c))
                });
                JoinIrreducible { index: a, certified: prime }
            })
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, s: Elem) -> &str {
        &self.elements[s]
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.elements.iter().position(|e| e == name)
    }

    #[inline]
    pub fn leq(&self, s: Elem, t: Elem) -> bool {
        self.leq[s * self.m + t]
    }

    #[inline]
    pub fn join(&self, s: Elem, t: Elem) -> Elem {
        self.join[s * self.m + t]
    }

    #[inline]
    pub fn meet(&self, s: Elem, t: Elem) -> Elem {
        self.meet[s * self.m + t]
    }

    #[inline]
    pub fn comp(&self, s: Elem, t: Elem) -> Elem {
        self.comp[s * self.m + t]
    }

    #[inline]
    pub fn neg(&self, s: Elem) -> Elem {
        self.neg[s]
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.bot, |acc, s| self.join(acc, s))
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.top, |acc, s| self.meet(acc, s))
    }

    pub fn leq_table(&self) -> &[bool] {
        &self.leq
    }

    pub fn comp_table(&self) -> &[Elem] {
        &self.comp
    }

    pub fn neg_table(&self) -> &[Elem] {
        &self.neg
    }

    /// Join-irreducibles in increasing index order.
    pub fn join_irreducibles(&self) -> &[JoinIrreducible] {
        &self.jis
    }

    pub fn is_join_irreducible(&self, s: Elem) -> bool {
        self.jis.iter().any(|j| j.index == s)
    }

    fn ji(&self, s: Elem) -> Option<JoinIrreducible> {
        self.jis.iter().copied().find(|j| j.index == s)
    }

    /// Largest element not above `a`.
    pub fn kappa(&self, a: JoinIrreducible) -> Elem {
        self.join_all((0..self.m).filter(|&t| !self.leq(a.index, t)))
    }

    /// `â = ∼κ(a)`.
    pub fn hat(&self, a: JoinIrreducible) -> Result<JoinIrreducible, AlgebraError> {
        let h = self.neg(self.kappa(a));
        self.ji(h).ok_or(AlgebraError::NonIrreducibleResult(a.index))
    }

    /// Hat by element index; panics if `a` is not join-irreducible.
    pub fn hat_of(&self, a: Elem) -> Elem {
        let ji = self.ji(a).expect("hat_of needs a join-irreducible");
        self.neg(self.kappa(ji))
    }

    /// Discriminator term
    /// `d(a,b,c) = ⊤;(d₁+d₂);⊤ · a + ∼(⊤;(d₁+d₂);⊤) · c`, with composition
    /// bracketed as `(⊤;x);⊤`.
    pub fn eval_discriminator_term(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        let d = self.join(self.d1(a, b), self.d1(b, a));
        let e = self.join(self.d2(a, b), self.d2(b, a));
        let t = self.comp(self.comp(self.top, self.join(d, e)), self.top);
        self.join(self.meet(t, a), self.meet(self.neg(t), c))
    }

    /// `d₁(x,y) = 1·(x;(y·∼y))`
    pub fn d1(&self, x: Elem, y: Elem) -> Elem {
        self.meet(self.one, self.comp(x, self.meet(y, self.neg(y))))
    }

    /// `d₂(x,y) = 1·(∼y;(x·∼y))`
    pub fn d2(&self, x: Elem, y: Elem) -> Elem {
        self.meet(self.one, self.comp(self.neg(y), self.meet(x, self.neg(y))))
    }

    pub fn to_raw(&self) -> RawAlgebra {
        let m = self.m;
        let mut leq = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i != j && self.leq(i, j) {
                    leq.push([i, j]);
                }
            }
        }
        RawAlgebra {
            name: self.name.clone(),
            elements: self.elements.clone(),
            leq,
            comp: (0..m).map(|i| (0..m).map(|j| self.comp(i, j)).collect()).collect(),
            neg: self.neg.clone(),
            one: self.one,
            bot: self.bot,
            top: self.top,
        }
    }

    /// Same algebra with elements renamed.
    pub fn with_element_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.m);
        self.elements = names;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    /// 2-element Boolean algebra with 1 = ⊤.
    pub(crate) fn two() -> RawAlgebra {
        RawAlgebra {
            name: "2".into(),
            elements: chain_names(2),
            leq: vec![[0, 1]],
            comp: vec![vec![0, 0], vec![0, 1]],
            neg: vec![1, 0],
            one: 1,
            bot: 0,
            top: 1,
        }
    }

    /// S₄ = {∅ < '<' < '≤' < ⊤}.
    pub(crate) fn s4() -> RawAlgebra {
        RawAlgebra {
            name: "S4".into(),
            elements: vec!["0".into(), "<".into(), "<=".into(), "T".into()],
            leq: vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]],
            comp: vec![vec![0, 0, 0, 0], vec![0, 1, 1, 3], vec![0, 1, 2, 3], vec![0, 3, 3, 3]],
            neg: vec![3, 2, 1, 0],
            one: 2,
            bot: 0,
            top: 3,
        }
    }

    /// 2² with ; = meet and 1 = ⊤.
    pub(crate) fn boolean4() -> RawAlgebra {
        RawAlgebra {
            name: "2^2".into(),
            elements: vec!["0".into(), "a".into(), "~a".into(), "1".into()],
            leq: vec![[0, 1], [0, 2], [0, 3], [1, 3], [2, 3]],
            comp: vec![vec![0, 0, 0, 0], vec![0, 1, 0, 1], vec![0, 0, 2, 2], vec![0, 1, 2, 3]],
            neg: vec![3, 2, 1, 0],
            one: 3,
            bot: 0,
            top: 3,
        }
    }

    #[test]
    fn trivial_algebra_passes() {
        let raw = RawAlgebra {
            name: "1".into(),
            elements: vec!["x".into()],
            leq: vec![],
            comp: vec![vec![0]],
            neg: vec![0],
            one: 0,
            bot: 0,
            top: 0,
        };
        assert!(validate_algebra(&raw).unwrap().passed());
        let a = FiniteAlgebra::new(raw).unwrap();
        assert!(a.join_irreducibles().is_empty());
        assert_eq!(a.zero(), 0);
    }

    #[test]
    fn boolean_with_identity_negation_fails_de_morgan() {
        let mut raw = boolean4();
        raw.neg = vec![0, 1, 2, 3];
        let report = validate_algebra(&raw).unwrap();
        let (label, w) = report.first_failure().unwrap();
        assert_eq!(label, "de-morgan");
        // oracle: ∼(s∧t) vs ∼s∨∼t by direct evaluation with ∼ = id
        let (s, t) = (w.get("s").unwrap(), w.get("t").unwrap());
        let a = FiniteAlgebra::new(boolean4()).unwrap();
        assert_ne!(a.meet(s, t), a.join(s, t));
    }

    #[test]
    fn malformed_tables_are_input_errors() {
        let mut raw = two();
        raw.comp[1].push(0);
        assert!(matches!(validate_algebra(&raw), Err(MalformedError::Ragged { .. })));
        let mut raw = two();
        raw.neg[0] = 7;
        assert!(matches!(
            FiniteAlgebra::new(raw),
            Err(AlgebraError::Malformed(MalformedError::OutOfRange { table: "neg", .. }))
        ));
    }

    #[test]
    fn non_transitive_order_fails_poset() {
        let mut raw = s4();
        raw.leq = vec![[0, 1], [1, 2], [2, 3]];
        assert_eq!(validate_algebra(&raw).unwrap().first_failure().unwrap().0, "poset");
    }

    #[test]
    fn bound_laws() {
        let a = FiniteAlgebra::new(s4()).unwrap();
        for s in 0..4 {
            assert_eq!(a.join(a.bot(), s), s);
            assert_eq!(a.meet(a.top(), s), s);
        }
        assert_eq!(a.join(1, 2), 2);
        assert_eq!(a.meet(1, 2), 1);
    }

    #[test]
    fn join_irreducibles_of_small_lattices() {
        let two = FiniteAlgebra::new(two()).unwrap();
        assert_eq!(two.join_irreducibles().iter().map(|j| j.index).collect::<Vec<_>>(), vec![1]);
        let b = FiniteAlgebra::new(boolean4()).unwrap();
        assert_eq!(b.join_irreducibles().iter().map(|j| j.index).collect::<Vec<_>>(), vec![1, 2]);
        let s4 = FiniteAlgebra::new(s4()).unwrap();
        let jis: Vec<_> = s4.join_irreducibles().iter().map(|j| j.index).collect();
        // brute force over the definition: a ≠ ⊥ and a = b∨c ⇒ a ∈ {b, c}
        let brute: Vec<_> = (0..4)
            .filter(|&a| a != 0 && (0..4).all(|b| (0..4).all(|c| s4.join(b, c) != a || b == a || c == a)))
            .collect();
        assert_eq!(jis, brute);
        assert_eq!(jis, vec![1, 2, 3]);
        assert!(s4.join_irreducibles().iter().all(|j| j.certified));
    }

    #[test]
    fn kappa_and_hat_on_s4() {
        let a = FiniteAlgebra::new(s4()).unwrap();
        let ji = |i| JoinIrreducible { index: i, certified: true };
        // oracle: join of {t : a ≰ t}
        for j in a.join_irreducibles() {
            let expected = (0..4).filter(|&t| !a.leq(j.index, t)).max_by_key(|&t| t).unwrap_or(0);
            assert_eq!(a.kappa(*j), expected);
        }
        assert_eq!(a.kappa(ji(1)), 0);
        assert_eq!(a.kappa(ji(3)), 2);
        assert_eq!(a.hat(ji(1)).unwrap().index, 3);
        assert_eq!(a.hat(ji(2)).unwrap().index, 2);
        assert_eq!(a.hat(ji(3)).unwrap().index, 1);
    }

    #[test]
    fn boolean_hat_and_kappa() {
        let a = FiniteAlgebra::new(boolean4()).unwrap();
        for j in a.join_irreducibles() {
            assert_eq!(a.kappa(*j), a.neg(j.index));
            assert_eq!(a.hat(*j).unwrap().index, j.index);
        }
    }

    #[test]
    fn non_irreducible_hat_is_reported() {
        // 3-chain with a broken "negation" sending κ(top) to bot
        let m = 3;
        let leq: Vec<bool> = (0..m * m).map(|k| k / m <= k % m).collect();
        let join: Vec<usize> = (0..m * m).map(|k| (k / m).max(k % m)).collect();
        let meet: Vec<usize> = (0..m * m).map(|k| (k / m).min(k % m)).collect();
        let comp = join.clone();
        let r = FiniteAlgebra::from_trusted_tables(
            "bad", chain_names(3), leq, join, meet, comp, vec![2, 0, 0], 0, 2, 0,
        );
        assert_eq!(r.unwrap_err(), AlgebraError::NonIrreducibleResult(2));
    }

    #[test]
    fn discriminator_diagonal_branch() {
        let a = FiniteAlgebra::new(boolean4()).unwrap();
        for s in 0..4 {
            assert_eq!(a.eval_discriminator_term(s, s, s), s);
        }
    }
}
