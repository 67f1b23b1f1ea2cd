//! The bounded representation game Γₙ on term networks, decided by
//! exhaustive alternating search.
//!
//! ∃ plays conservatively: she adds exactly the labels a move asks for.
//! `survive(N, r)` holds when `N` is consistent and, for every move of ∀,
//! some answer of ∃ survives `r - 1` further moves. A move whose request is
//! already met leaves `N` unchanged; since surviving `r` moves implies
//! surviving `r - 1`, such moves never help ∀ and are skipped.

use std::collections::{HashMap, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra};

use super::network::{term_consistent, term_inconsistency, ElemSet, TermNetwork, MAX_TERM_ELEMENTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaOutcome {
    Exists,
    Forall,
    /// The search hit its state limit before deciding.
    Inconclusive,
}

/// A move of ∀ after initialisation. Element arguments are indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "lowercase")]
pub enum GammaMove {
    /// `t ∈ λ(x,y)` with `t ≤ a + b`; ∃ adds `a` or `b` to `λ(x,y)`.
    Join { x: usize, y: usize, t: Elem, a: Elem, b: Elem },
    /// ∃ adds `a` to `λ(x,y)` or `∼a` to `λ(y,x)`.
    Involution { x: usize, y: usize, a: Elem },
    /// `t ∈ λ(x,y)`, `t' ∈ λ(y,z)`; ∃ adds `t;t'` to `λ(x,z)`.
    Composition { x: usize, y: usize, z: usize, t: Elem, t2: Elem },
    /// `t = b;c ∈ λ(x,y)`; ∃ picks `z` (possibly new) and adds `b` to
    /// `λ(x,z)` and `c` to `λ(z,y)`.
    Witness { x: usize, y: usize, t: Elem, b: Elem, c: Elem },
}

/// One step of a ∀-winning play: the move and the answer ∃ chose (every
/// answer loses). `labels` lists element names per node pair.
#[derive(Clone, Debug, Serialize)]
pub struct GammaStep {
    #[serde(flatten)]
    pub mv: GammaMove,
    pub network_after: Vec<Vec<Vec<String>>>,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaVerdict {
    pub outcome: GammaOutcome,
    pub rounds: usize,
    /// For ∀: the initial pair `a ≰ b` on which both initial networks lose.
    pub pair: Option<(Elem, Elem)>,
    /// For ∀: a losing play from each initial network, in order one node
    /// then two nodes.
    pub transcripts: Vec<Vec<GammaStep>>,
    pub states: usize,
    pub reason: Option<String>,
}

impl fmt::Display for GammaOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaOutcome::Exists => "∃ survives",
            GammaOutcome::Forall => "∀ wins",
            GammaOutcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaLimits {
    pub max_states: usize,
}

impl Default for GammaLimits {
    fn default() -> Self {
        GammaLimits { max_states: 4_000_000 }
    }
}

struct Exhausted;

/// An answer of ∃: labels to add, after adding a fresh node if `fresh`.
#[derive(Clone, Copy, Debug)]
struct Answer {
    fresh: bool,
    adds: [(usize, usize, Elem); 2],
    len: usize,
}

impl Answer {
    fn one(x: usize, y: usize, e: Elem) -> Self {
        Answer { fresh: false, adds: [(x, y, e); 2], len: 1 }
    }

    fn two(fresh: bool, first: (usize, usize, Elem), second: (usize, usize, Elem)) -> Self {
        Answer { fresh, adds: [first, second], len: 2 }
    }

    fn adds(&self) -> &[(usize, usize, Elem)] {
        &self.adds[..self.len]
    }

    fn apply(&self, n: &TermNetwork, alg: &FiniteAlgebra) -> TermNetwork {
        let mut out = if self.fresh { n.with_new_node(alg) } else { n.clone() };
        for &(x, y, e) in self.adds() {
            out = out.with(x, y, e);
        }
        out
    }

    /// Consistency of the answered network, given `n` is consistent. Any
    /// new clash involves an added label.
    fn consistent(&self, n: &TermNetwork, alg: &FiniteAlgebra) -> bool {
        let top = 1u128 << alg.top();
        let label = |u: usize, v: usize| {
            let base = if u < n.nodes && v < n.nodes {
                n.label(u, v)
            } else if u == v {
                top | 1 << alg.one()
            } else {
                top
            };
            self.adds().iter().filter(|a| a.0 == u && a.1 == v).fold(base, |acc, a| acc | 1 << a.2)
        };
        self.adds().iter().all(|&(x, y, e)| label(y, x) >> alg.neg(e) & 1 == 0)
    }
}

struct Search<'a> {
    alg: &'a FiniteAlgebra,
    memo: HashMap<(TermNetwork, usize), bool>,
    limits: GammaLimits,
}

impl<'a> Search<'a> {
    /// Moves of ∀ that change `n`, each with the answers of ∃.
    fn moves(&self, n: &TermNetwork) -> Vec<(GammaMove, Vec<Answer>)> {
        let alg = self.alg;
        let m = alg.size();
        let nodes = n.nodes;
        let elems = |s: ElemSet| (0..m).filter(move |&e| s >> e & 1 == 1);
        let mut out = Vec::new();
        // forced additions first
        let mut seen = HashSet::new();
        for x in 0..nodes {
            for y in 0..nodes {
                for z in 0..nodes {
                    for t in elems(n.label(x, y)) {
                        for t2 in elems(n.label(y, z)) {
                            let e = alg.comp(t, t2);
                            if !n.contains(x, z, e) && seen.insert((x, z, e)) {
                                out.push((GammaMove::Composition { x, y, z, t, t2 }, vec![Answer::one(x, z, e)]));
                            }
                        }
                    }
                }
            }
        }
        for x in 0..nodes {
            for y in 0..nodes {
                for a in 0..m {
                    if !n.contains(x, y, a) && !n.contains(y, x, alg.neg(a)) {
                        let answers = vec![Answer::one(x, y, a), Answer::one(y, x, alg.neg(a))];
                        out.push((GammaMove::Involution { x, y, a }, answers));
                    }
                }
            }
        }
        for x in 0..nodes {
            for y in 0..nodes {
                let label = n.label(x, y);
                for a in (0..m).filter(|&a| label >> a & 1 == 0) {
                    for b in (a..m).filter(|&b| label >> b & 1 == 0) {
                        let j = alg.join(a, b);
                        if let Some(t) = elems(label).find(|&t| alg.leq(t, j)) {
                            let mut answers = vec![Answer::one(x, y, a)];
                            if b != a {
                                answers.push(Answer::one(x, y, b));
                            }
                            out.push((GammaMove::Join { x, y, t, a, b }, answers));
                        }
                    }
                }
            }
        }
        for x in 0..nodes {
            for y in 0..nodes {
                for t in elems(n.label(x, y)) {
                    for (b, c) in (0..m).cartesian_product(0..m) {
                        if alg.comp(b, c) != t {
                            continue;
                        }
                        if (0..nodes).any(|z| n.contains(x, z, b) && n.contains(z, y, c)) {
                            continue;
                        }
                        let mut answers: Vec<Answer> =
                            (0..nodes).map(|z| Answer::two(false, (x, z, b), (z, y, c))).collect();
                        answers.push(Answer::two(true, (x, nodes, b), (nodes, y, c)));
                        out.push((GammaMove::Witness { x, y, t, b, c }, answers));
                    }
                }
            }
        }
        out
    }

    /// `survive(n, r)` for a consistent `n`.
    fn survive(&mut self, n: &TermNetwork, r: usize) -> Result<bool, Exhausted> {
        if r == 0 {
            return Ok(true);
        }
        let key = (n.canonical(), r);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        if self.memo.len() >= self.limits.max_states {
            return Err(Exhausted);
        }
        let moves = self.moves(n);
        let alg = self.alg;
        let live: Vec<Vec<Answer>> =
            moves.into_iter().map(|(_, ans)| ans.into_iter().filter(|a| a.consistent(n, alg)).collect()).collect();
        if live.iter().any(|ans| ans.is_empty()) || r == 1 {
            let result = r == 1 && live.iter().all(|ans| !ans.is_empty());
            self.memo.insert(key, result);
            return Ok(result);
        }
        let mut result = true;
        for answers in live {
            let mut saved = false;
            for a in answers {
                if self.survive(&a.apply(n, alg), r - 1)? {
                    saved = true;
                    break;
                }
            }
            if !saved {
                result = false;
                break;
            }
        }
        self.memo.insert(key, result);
        Ok(result)
    }

    fn loses(&mut self, n: &TermNetwork, r: usize) -> bool {
        !term_consistent(n, self.alg) || matches!(self.survive(n, r), Ok(false))
    }

    /// A losing play from `n` (which must not survive `r` moves).
    fn refutation(&mut self, n: &TermNetwork, r: usize) -> Vec<GammaStep> {
        let alg = self.alg;
        let mut out = Vec::new();
        let mut current = n.clone();
        let mut left = r;
        while term_consistent(&current, alg) && left > 0 {
            let mut next = None;
            for (mv, answers) in self.moves(&current) {
                let nets: Vec<TermNetwork> = answers.iter().map(|a| a.apply(&current, alg)).collect();
                if nets.iter().all(|m| self.loses(m, left - 1)) {
                    next = Some((mv, nets[0].clone()));
                    break;
                }
            }
            let (mv, after) = next.expect("network that does not survive has a refuting move");
            out.push(GammaStep { mv, network_after: after.label_names(alg), consistent: term_consistent(&after, alg) });
            current = after;
            left -= 1;
        }
        out
    }
}

/// Decides Γ_rounds for `alg` with the default state limit.
pub fn decide_gamma(alg: &FiniteAlgebra, rounds: usize) -> GammaVerdict {
    decide_gamma_with(alg, rounds, GammaLimits::default())
}

/// ∃ wins iff for every `a ≰ b` one of the two initial networks survives
/// `rounds` moves.
pub fn decide_gamma_with(alg: &FiniteAlgebra, rounds: usize, limits: GammaLimits) -> GammaVerdict {
    let verdict = |outcome, pair, transcripts, states, reason| GammaVerdict {
        outcome,
        rounds,
        pair,
        transcripts,
        states,
        reason,
    };
    if alg.size() > MAX_TERM_ELEMENTS {
        let reason = format!("term networks support at most {MAX_TERM_ELEMENTS} elements");
        return verdict(GammaOutcome::Inconclusive, None, Vec::new(), 0, Some(reason));
    }
    let mut search = Search { alg, memo: HashMap::new(), limits };
    let m = alg.size();
    for a in 0..m {
        for b in (0..m).filter(|&b| !alg.leq(a, b)) {
            let starts = [TermNetwork::initial_one(alg, a, b), TermNetwork::initial_two(alg, a, b)];
            let mut saved = false;
            for s in starts.iter().filter(|s| term_consistent(s, alg)) {
                match search.survive(s, rounds) {
                    Ok(true) => {
                        saved = true;
                        break;
                    }
                    Ok(false) => {}
                    Err(Exhausted) => {
                        let states = search.memo.len();
                        let reason = format!("state limit {} reached", limits.max_states);
                        return verdict(GammaOutcome::Inconclusive, None, Vec::new(), states, Some(reason));
                    }
                }
            }
            if !saved {
                let transcripts = starts.iter().map(|s| search.refutation(s, rounds)).collect();
                let states = search.memo.len();
                return verdict(GammaOutcome::Forall, Some((a, b)), transcripts, states, None);
            }
        }
    }
    verdict(GammaOutcome::Exists, None, Vec::new(), search.memo.len(), None)
}

/// Describes why an initial network is inconsistent, if it is.
pub fn initial_clash(alg: &FiniteAlgebra, n: &TermNetwork) -> Option<String> {
    term_inconsistency(n, alg).map(|(x, y, t)| {
        format!("{} in λ({x},{y}) and {} in λ({y},{x})", alg.element_name(t), alg.element_name(alg.neg(t)))
    })
}
