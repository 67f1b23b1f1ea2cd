//! Quasiequational theories Φ₂ and Φ₃, their frame counterparts, and the
//! extra identities (associativity, diagonal, top-simplicity).
//!
//! Quasiequations are small expression trees compiled to a flat stack
//! program and evaluated over every assignment in lexicographic order, so
//! the first witness found is the lexicographically least one.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{validate_algebra, Elem, FiniteAlgebra};
use crate::frame::{Point, RelevanceFrame};
use crate::report::{AxiomReport, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    Bot,
    Top,
    One,
    Zero,
    Neg(Box<Term>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Comp(Box<Term>, Box<Term>),
}

fn var(i: usize) -> Term {
    Term::Var(i)
}
fn neg(t: Term) -> Term {
    Term::Neg(Box::new(t))
}
fn join(a: Term, b: Term) -> Term {
    Term::Join(Box::new(a), Box::new(b))
}
fn meet(a: Term, b: Term) -> Term {
    Term::Meet(Box::new(a), Box::new(b))
}
fn comp(a: Term, b: Term) -> Term {
    Term::Comp(Box::new(a), Box::new(b))
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Var(u8),
    Const(Elem),
    Neg,
    Join,
    Meet,
    Comp,
}

#[derive(Clone, Debug)]
struct Program(Vec<Op>);

impl Program {
    fn compile(t: &Term, alg: &FiniteAlgebra) -> Self {
        fn go(t: &Term, alg: &FiniteAlgebra, out: &mut Vec<Op>) {
            match t {
                Term::Var(i) => out.push(Op::Var(*i as u8)),
                Term::Bot => out.push(Op::Const(alg.bot())),
                Term::Top => out.push(Op::Const(alg.top())),
                Term::One => out.push(Op::Const(alg.one())),
                Term::Zero => out.push(Op::Const(alg.zero())),
                Term::Neg(a) => {
                    go(a, alg, out);
                    out.push(Op::Neg);
                }
                Term::Join(a, b) | Term::Meet(a, b) | Term::Comp(a, b) => {
                    go(a, alg, out);
                    go(b, alg, out);
                    out.push(match t {
                        Term::Join(..) => Op::Join,
                        Term::Meet(..) => Op::Meet,
                        _ => Op::Comp,
                    });
                }
            }
        }
        let mut out = Vec::new();
        go(t, alg, &mut out);
        Program(out)
    }

    #[inline]
    fn eval(&self, alg: &FiniteAlgebra, env: &[Elem]) -> Elem {
        let mut stack = [0usize; 32];
        let mut sp = 0;
        for op in &self.0 {
            match *op {
                Op::Var(i) => {
                    stack[sp] = env[i as usize];
                    sp += 1;
                }
                Op::Const(c) => {
                    stack[sp] = c;
                    sp += 1;
                }
                Op::Neg => stack[sp - 1] = alg.neg(stack[sp - 1]),
                Op::Join | Op::Meet | Op::Comp => {
                    let (a, b) = (stack[sp - 2], stack[sp - 1]);
                    sp -= 1;
                    stack[sp - 1] = match op {
                        Op::Join => alg.join(a, b),
                        Op::Meet => alg.meet(a, b),
                        _ => alg.comp(a, b),
                    };
                }
            }
        }
        stack[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Leq(Term, Term),
    Eq(Term, Term),
}

/// `premises ⇒ conclusion`, universally quantified over `vars`.
#[derive(Clone, Debug)]
pub struct Quasi {
    pub label: &'static str,
    pub vars: &'static [&'static str],
    pub premises: Vec<Atom>,
    pub conclusion: Atom,
}

struct CompiledAtom {
    eq: bool,
    lhs: Program,
    rhs: Program,
}

impl CompiledAtom {
    fn new(a: &Atom, alg: &FiniteAlgebra) -> Self {
        let (eq, l, r) = match a {
            Atom::Leq(l, r) => (false, l, r),
            Atom::Eq(l, r) => (true, l, r),
        };
        CompiledAtom { eq, lhs: Program::compile(l, alg), rhs: Program::compile(r, alg) }
    }

    #[inline]
    fn holds(&self, alg: &FiniteAlgebra, env: &[Elem]) -> bool {
        let (l, r) = (self.lhs.eval(alg, env), self.rhs.eval(alg, env));
        if self.eq {
            l == r
        } else {
            alg.leq(l, r)
        }
    }
}

impl Quasi {
    /// Lexicographically least violating assignment, if any.
    pub fn find_violation(&self, alg: &FiniteAlgebra) -> Option<Witness> {
        let premises: Vec<_> = self.premises.iter().map(|a| CompiledAtom::new(a, alg)).collect();
        let conclusion = CompiledAtom::new(&self.conclusion, alg);
        let n = self.vars.len();
        let m = alg.size();
        let mut env = vec![0; n];
        loop {
            if premises.iter().all(|p| p.holds(alg, &env)) && !conclusion.holds(alg, &env) {
                return Some(Witness::new(self.vars.iter().copied().zip(env.iter().copied())));
            }
            // odometer, last variable fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                env[i] += 1;
                if env[i] < m {
                    break;
                }
                env[i] = 0;
            }
        }
    }

    /// Re-evaluates the quasiequation at one assignment.
    pub fn holds_at(&self, alg: &FiniteAlgebra, env: &[Elem]) -> bool {
        let premises_hold =
            self.premises.iter().all(|p| CompiledAtom::new(p, alg).holds(alg, env));
        !premises_hold || CompiledAtom::new(&self.conclusion, alg).holds(alg, env)
    }
}

const S: usize = 0;
const T: usize = 1;
const U: usize = 2;
const V: usize = 3;

/// The quasiequations of Φ₂; the biconditional (2) is split by direction.
pub fn phi2_items() -> Vec<Quasi> {
    let s = || var(S);
    let t = || var(T);
    let u = || var(U);
    let v = || var(V);
    let not_zero_premise = || meet(comp(s(), neg(t())), Term::One);
    vec![
        Quasi {
            label: "phi2.1",
            vars: &["s"],
            premises: vec![],
            conclusion: Atom::Leq(meet(s(), neg(s())), Term::Zero),
        },
        Quasi {
            label: "phi2.2=>",
            vars: &["s", "t"],
            premises: vec![Atom::Leq(s(), t())],
            conclusion: Atom::Leq(not_zero_premise(), Term::Zero),
        },
        Quasi {
            label: "phi2.2<=",
            vars: &["s", "t"],
            premises: vec![Atom::Leq(not_zero_premise(), Term::Zero)],
            conclusion: Atom::Leq(s(), t()),
        },
        Quasi {
            label: "phi2.3",
            vars: &["s", "t", "u"],
            premises: vec![Atom::Leq(s(), comp(t(), u())), Atom::Leq(comp(s(), t()), neg(u()))],
            conclusion: Atom::Leq(meet(s(), Term::One), Term::Zero),
        },
        Quasi {
            label: "phi2.4",
            vars: &["s", "t", "u"],
            premises: vec![Atom::Leq(s(), comp(t(), u())), Atom::Leq(comp(u(), s()), neg(t()))],
            conclusion: Atom::Leq(meet(s(), Term::One), Term::Zero),
        },
        Quasi {
            label: "phi2.5",
            vars: &["s", "t", "u", "v"],
            premises: vec![
                Atom::Leq(s(), comp(t(), u())),
                Atom::Leq(
                    join(
                        meet(meet(s(), Term::One), comp(t(), v())),
                        meet(meet(Term::One, s()), comp(neg(v()), u())),
                    ),
                    Term::Zero,
                ),
            ],
            conclusion: Atom::Leq(meet(s(), Term::One), Term::Zero),
        },
    ]
}

/// The five additional quasiequations of Φ₃ (Φ₃ also contains Φ₂).
pub fn phi3_extra_items() -> Vec<Quasi> {
    let s = || var(S);
    let t = || var(T);
    let u = || var(U);
    let v = || var(V);
    // primed variables for item (3)
    let s2 = || var(2);
    let t2 = || var(3);
    let s1 = || meet(s(), Term::One);
    let u1 = || meet(u(), Term::One);
    vec![
        Quasi {
            label: "phi3.1",
            vars: &["s", "t", "u"],
            premises: vec![Atom::Leq(comp(s(), t()), neg(u()))],
            conclusion: Atom::Leq(comp(t(), u()), neg(s())),
        },
        Quasi {
            label: "phi3.2",
            vars: &["s", "t", "u", "v"],
            premises: vec![],
            conclusion: Atom::Leq(
                meet(s(), comp(t(), u())),
                join(comp(meet(comp(s(), v()), t()), u()), comp(t(), meet(u(), neg(v())))),
            ),
        },
        Quasi {
            label: "phi3.3",
            vars: &["s", "t", "s'", "t'"],
            premises: vec![Atom::Leq(
                meet(meet(Term::One, comp(neg(s2()), s())), comp(t(), neg(t2()))),
                Term::Zero,
            )],
            conclusion: Atom::Leq(
                comp(s(), t()),
                join(comp(meet(s(), s2()), t()), comp(s(), meet(t(), t2()))),
            ),
        },
        Quasi {
            label: "phi3.4",
            vars: &["s", "t", "u"],
            premises: vec![Atom::Eq(meet(meet(Term::One, s()), Term::Zero), Term::Bot)],
            conclusion: Atom::Leq(comp(s1(), comp(t(), u())), comp(comp(s1(), t()), u())),
        },
        Quasi {
            label: "phi3.5",
            vars: &["s", "t", "u"],
            premises: vec![Atom::Eq(meet(meet(Term::One, u()), Term::Zero), Term::Bot)],
            conclusion: Atom::Leq(comp(comp(s(), t()), u1()), comp(s(), comp(t(), u1()))),
        },
    ]
}

fn run_items(alg: &FiniteAlgebra, items: &[Quasi], stop_early: bool) -> AxiomReport {
    let mut report = AxiomReport::new();
    for q in items {
        let result = q.find_violation(alg);
        let failed = result.is_some();
        report.record(q.label, result);
        if failed && stop_early {
            break;
        }
    }
    report
}

/// All items of Φ₂, each with its least witness on failure.
pub fn check_phi2(alg: &FiniteAlgebra) -> AxiomReport {
    run_items(alg, &phi2_items(), false)
}

/// Φ₂ followed by the extra Φ₃ items.
pub fn check_phi3(alg: &FiniteAlgebra) -> AxiomReport {
    let mut report = check_phi2(alg);
    report.extend(run_items(alg, &phi3_extra_items(), false));
    report
}

/// Fast yes/no versions that stop at the first failing item.
pub fn satisfies_phi2(alg: &FiniteAlgebra) -> bool {
    run_items(alg, &phi2_items(), true).passed()
}

pub fn satisfies_phi3(alg: &FiniteAlgebra) -> bool {
    satisfies_phi2(alg) && run_items(alg, &phi3_extra_items(), true).passed()
}

pub fn associativity_violation(alg: &FiniteAlgebra) -> Option<Witness> {
    let m = alg.size();
    for s in 0..m {
        for t in 0..m {
            let st = alg.comp(s, t);
            for u in 0..m {
                if alg.comp(st, u) != alg.comp(s, alg.comp(t, u)) {
                    return Some(Witness::new([("s", s), ("t", t), ("u", u)]));
                }
            }
        }
    }
    None
}

pub fn check_associativity(alg: &FiniteAlgebra) -> AxiomReport {
    let mut report = AxiomReport::new();
    report.record("associativity", associativity_violation(alg));
    report
}

/// `1·0 = ⊥`
pub fn check_diagonal(alg: &FiniteAlgebra) -> bool {
    alg.meet(alg.one(), alg.zero()) == alg.bot()
}

/// `⊤;s;⊤ = ⊤` for every `s ≠ ⊥` (and `⊥` for `s = ⊥`).
pub fn check_top_simple(alg: &FiniteAlgebra) -> bool {
    (0..alg.size()).all(|s| {
        let v = alg.comp(alg.comp(alg.top(), s), alg.top());
        if s == alg.bot() {
            v == alg.bot()
        } else {
            v == alg.top()
        }
    })
}

// ---------------------------------------------------------------------------
// frame conditions

fn first<I: IntoIterator<Item = Witness>>(it: I) -> Option<Witness> {
    it.into_iter().next()
}

/// The four frame conditions equivalent to Φ₂.
pub fn check_frame_conditions_2(f: &RelevanceFrame) -> AxiomReport {
    let k = f.len();
    let h = |a: Point| f.hat(a);
    let sym_id = |a: Point| f.ident(a) && h(a) == a;
    let mut report = AxiomReport::new();

    report.record(
        "frame2.1",
        first((0..k).filter(|&a| !(0..k).any(|b| sym_id(b) && f.r(b, a, h(a)))).map(|a| Witness::new([("a", a)]))),
    );
    let pairs = || (0..k).flat_map(|a| (0..k).map(move |b| (a, b)));
    report.record(
        "frame2.2",
        first(
            pairs()
                .filter(|&(a, b)| sym_id(a) && f.r(a, b, h(b)) && !f.r(b, a, b))
                .map(|(a, b)| Witness::new([("a", a), ("b", b)])),
        ),
    );
    report.record(
        "frame2.3",
        first(
            pairs()
                .filter(|&(a, b)| sym_id(a) && f.r(a, b, h(b)) && !f.r(h(b), h(b), a))
                .map(|(a, b)| Witness::new([("a", a), ("b", b)])),
        ),
    );
    report.record(
        "frame2.4",
        first(
            (0..k)
                .filter(|&a| sym_id(a))
                .flat_map(|a| f.r_min(a))
                .filter(|t| t.b != h(t.c))
                .map(|t| Witness::new([("a", t.a), ("b", t.b), ("c", t.c)])),
        ),
    );
    report
}

/// Frame conditions for Φ₃: those of Φ₂ and five more.
pub fn check_frame_conditions_3(f: &RelevanceFrame) -> AxiomReport {
    let k = f.len();
    let h = |a: Point| f.hat(a);
    let sym_id = |d: Point| f.ident(d) && h(d) == d;
    let mins: Vec<_> = (0..k).flat_map(|a| f.r_min(a)).collect();
    let mut report = check_frame_conditions_2(f);

    report.record(
        "frame3.1",
        first(
            mins.iter()
                .filter(|t| !f.r(t.b, t.a, h(t.c)))
                .map(|t| Witness::new([("a", t.a), ("b", t.b), ("c", t.c)])),
        ),
    );
    let triples = || (0..k).flat_map(move |a| (0..k).flat_map(move |b| (0..k).map(move |c| (a, b, c))));
    report.record(
        "frame3.2",
        first(
            triples()
                .filter(|&(a, b, c)| f.r(a, h(b), h(c)) && !f.r(b, h(c), h(a)))
                .map(|(a, b, c)| Witness::new([("a", a), ("b", b), ("c", c)])),
        ),
    );
    report.record(
        "frame3.3",
        first(
            mins.iter()
                .filter(|t| !(0..k).any(|d| sym_id(d) && f.r(d, h(t.b), t.b) && f.r(d, t.c, h(t.c))))
                .map(|t| Witness::new([("a", t.a), ("b", t.b), ("c", t.c)])),
        ),
    );
    report.record(
        "frame3.4",
        first(mins.iter().flat_map(|t| {
            (0..k)
                .filter(move |&d| sym_id(d) && f.r(t.a, d, t.a) && !f.r(t.b, d, t.b))
                .map(move |d| Witness::new([("a", t.a), ("b", t.b), ("c", t.c), ("d", d)]))
        })),
    );
    report.record(
        "frame3.5",
        first(mins.iter().flat_map(|t| {
            (0..k)
                .filter(move |&d| sym_id(d) && f.r(t.a, t.a, d) && !f.r(t.c, t.c, d))
                .map(move |d| Witness::new([("a", t.a), ("b", t.b), ("c", t.c), ("d", d)]))
        })),
    );
    report
}

// ---------------------------------------------------------------------------
// profiles

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct AxiomProfile {
    pub base: bool,
    pub phi2: bool,
    pub phi3: bool,
    pub associativity: bool,
    pub diagonal: bool,
}

impl AxiomProfile {
    pub const BASE: AxiomProfile =
        AxiomProfile { base: true, phi2: false, phi3: false, associativity: false, diagonal: false };

    pub fn wkra2() -> Self {
        AxiomProfile { phi2: true, ..Self::BASE }
    }

    /// Φ₃ includes Φ₂.
    pub fn wkra3() -> Self {
        AxiomProfile { phi2: true, phi3: true, ..Self::BASE }
    }

    pub fn with_associativity(self) -> Self {
        AxiomProfile { associativity: true, ..self }
    }

    pub fn all() -> Self {
        AxiomProfile { base: true, phi2: true, phi3: true, associativity: true, diagonal: true }
    }

    /// Whether `alg` (already known to satisfy the base axioms) meets the
    /// profile; cheapest checks first.
    pub fn admits(&self, alg: &FiniteAlgebra) -> bool {
        (!self.diagonal || check_diagonal(alg))
            && (!self.associativity || associativity_violation(alg).is_none())
            && (!self.phi3 || satisfies_phi3(alg))
            && (!self.phi2 || satisfies_phi2(alg))
    }

    /// Full report: the base axioms re-checked from the raw tables, then
    /// each selected theory.
    pub fn check(&self, alg: &FiniteAlgebra) -> AxiomReport {
        let mut report = AxiomReport::new();
        if self.base {
            report.extend(validate_algebra(&alg.to_raw()).expect("loaded algebra is well-shaped"));
        }
        if self.phi3 {
            report.extend(check_phi3(alg));
        } else if self.phi2 {
            report.extend(check_phi2(alg));
        }
        if self.associativity {
            report.extend(check_associativity(alg));
        }
        if self.diagonal {
            let d = check_diagonal(alg);
            report.record(
                "diagonal",
                (!d).then(|| Witness::new([("1", alg.one()), ("0", alg.zero())])),
            );
        }
        report
    }
}

impl FromStr for AxiomProfile {
    type Err = String;

    /// `base`, `wkra2`, `wkra3`, `assoc`, `diagonal`, `all`, or several
    /// joined with `+` (e.g. `wkra3+assoc`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = AxiomProfile::BASE;
        for part in s.split('+') {
            match part.trim() {
                "base" => {}
                "wkra2" | "phi2" => p.phi2 = true,
                "wkra3" | "phi3" => {
                    p.phi2 = true;
                    p.phi3 = true
                }
                "assoc" | "associativity" => p.associativity = true,
                "diagonal" => p.diagonal = true,
                "all" => p = AxiomProfile::all(),
                other => return Err(format!("unknown profile component `{other}`")),
            }
        }
        Ok(p)
    }
}

impl fmt::Display for AxiomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec!["base"];
        if self.phi3 {
            parts.push("wkra3");
        } else if self.phi2 {
            parts.push("wkra2");
        }
        if self.associativity {
            parts.push("assoc");
        }
        if self.diagonal {
            parts.push("diagonal");
        }
        write!(f, "{}", parts.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RawAlgebra;
    use crate::frame::algebra_to_frame;

    fn chain(n: usize, comp: Vec<Vec<usize>>, one: usize) -> FiniteAlgebra {
        let mut leq = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                leq.push([i, j]);
            }
        }
        FiniteAlgebra::new(RawAlgebra {
            name: format!("chain{n}"),
            elements: (0..n).map(|i| format!("c{i}")).collect(),
            leq,
            comp,
            neg: (0..n).rev().collect(),
            one,
            bot: 0,
            top: n - 1,
        })
        .unwrap()
    }

    /// S₃ = a₋₁ < a₀ < a₁ with the Sugihara product.
    fn s3() -> FiniteAlgebra {
        chain(3, vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 2]], 1)
    }

    fn s4() -> FiniteAlgebra {
        chain(4, vec![vec![0, 0, 0, 0], vec![0, 1, 1, 3], vec![0, 1, 2, 3], vec![0, 3, 3, 3]], 2)
    }

    fn trivial() -> FiniteAlgebra {
        chain(1, vec![vec![0]], 0)
    }

    #[test]
    fn s3_fails_phi2_converse_direction() {
        let a = s3();
        let report = check_phi2(&a);
        assert!(!report.passed());
        let (label, w) = report.first_failure().unwrap();
        assert_eq!(label, "phi2.2<=");
        let item = &phi2_items()[2];
        assert!(!item.holds_at(&a, &[w.get("s").unwrap(), w.get("t").unwrap()]));
        // ⊤;∼1·1 ≤ 0 holds yet ⊤ ≰ 1
        assert!(!item.holds_at(&a, &[a.top(), a.one()]));
        assert!(!check_phi3(&a).passed());
        assert!(!check_frame_conditions_2(&algebra_to_frame(&a)).passed());
    }

    #[test]
    fn s4_passes_everything_but_diagonal() {
        let a = s4();
        assert!(check_phi3(&a).passed());
        assert!(check_associativity(&a).passed());
        let f = algebra_to_frame(&a);
        assert!(check_frame_conditions_2(&f).passed());
        assert!(check_frame_conditions_3(&f).passed());
        // 0 = '<', 1 = '≤', 1·0 = '<' ≠ ⊥
        assert_eq!(a.meet(a.one(), a.zero()), 1);
        assert!(!check_diagonal(&a));
        assert!(check_top_simple(&a));
    }

    #[test]
    fn trivial_algebra() {
        let a = trivial();
        assert!(check_phi3(&a).passed());
        assert!(check_associativity(&a).passed());
        assert!(check_diagonal(&a));
        assert!(check_top_simple(&a));
    }

    #[test]
    fn witnesses_are_lexicographically_least() {
        let a = s3();
        let item = &phi2_items()[2];
        let w = item.find_violation(&a).unwrap();
        let found = (w.get("s").unwrap(), w.get("t").unwrap());
        let brute = (0..3)
            .flat_map(|s| (0..3).map(move |t| (s, t)))
            .find(|&(s, t)| !item.holds_at(&a, &[s, t]))
            .unwrap();
        assert_eq!(found, brute);
    }

    #[test]
    fn profile_parsing() {
        let p: AxiomProfile = "wkra3+assoc".parse().unwrap();
        assert!(p.phi2 && p.phi3 && p.associativity && !p.diagonal);
        assert_eq!(p.to_string(), "base+wkra3+assoc");
        assert!("wkra9".parse::<AxiomProfile>().is_err());
    }

    // Every non-⊥ element lies above 0, so the premises of phi3.4/phi3.5
    // force s = ⊥ and both items hold vacuously; the frame conditions
    // still see the self-hat identity point p2 with R(p0,p2,p0) but not
    // R(p1,p2,p1).
    #[test]
    fn vacuous_phi3_items_against_frame_conditions() {
        let raw: RawAlgebra = serde_json::from_str(
            r#"{"name":"E6_9464","elements":["bot","p0","p1","p2","p1+p2","p3"],
            "leq":[[0,1],[0,2],[0,3],[0,4],[0,5],[1,2],[1,3],[1,4],[1,5],[2,4],[2,5],[3,4],[3,5],[4,5]],
            "comp":[[0,0,0,0,0,0],[0,0,1,1,1,4],[0,1,2,1,2,5],[0,1,1,3,3,5],[0,1,2,3,4,5],[0,4,5,5,5,5]],
            "neg":[5,4,3,2,1,0],"one":4,"bot":0,"top":5}"#,
        )
        .unwrap();
        let a = FiniteAlgebra::new(raw).unwrap();
        assert!(satisfies_phi3(&a));
        let f = algebra_to_frame(&a);
        assert!(check_frame_conditions_2(&f).passed());
        let report = check_frame_conditions_3(&f);
        let labels: Vec<&str> = report.failures().map(|(l, _)| l).collect();
        assert_eq!(labels, ["frame3.4", "frame3.5"]);
    }
}
