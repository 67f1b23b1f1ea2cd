//! The sentences σₙ: ∃ survives n rounds of conservative Γ play. Built by
//! the recursive φ construction over term networks whose labels are terms.
//!
//! Concrete syntax (ASCII). Terms: variables, `top`, `bot`, `one`, `~t`,
//! `[t ; u]`, `[t + u]`, `[t * u]`. Formulas: `t = u`, `t != u`, `t <= u`,
//! `t !<= u`, `true`, `false`, `(f & g & ...)`, `(f | g | ...)`,
//! `(f => g)`, `(forall a b. f)`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};

/// Default bound on the number of formula nodes.
pub const DEFAULT_SIGMA_LIMIT: usize = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SigmaError {
    #[error("sigma_{n} exceeds {limit} formula nodes")]
    TooLarge { n: usize, limit: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("free variable {0}")]
    FreeVariable(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Top,
    Bot,
    One,
    Neg(Box<Term>),
    Comp(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Ne,
    Le,
    Nle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(Rel, Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Term {
    fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    fn neg(self) -> Term {
        Term::Neg(Box::new(self))
    }

    fn comp(self, other: Term) -> Term {
        Term::Comp(Box::new(self), Box::new(other))
    }

    fn join(self, other: Term) -> Term {
        Term::Join(Box::new(self), Box::new(other))
    }

    fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Top | Term::Bot | Term::One => 1,
            Term::Neg(t) => 1 + t.size(),
            Term::Comp(a, b) | Term::Join(a, b) | Term::Meet(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Top => f.write_str("top"),
            Term::Bot => f.write_str("bot"),
            Term::One => f.write_str("one"),
            Term::Neg(t) => write!(f, "~{t}"),
            Term::Comp(a, b) => write!(f, "[{a} ; {b}]"),
            Term::Join(a, b) => write!(f, "[{a} + {b}]"),
            Term::Meet(a, b) => write!(f, "[{a} * {b}]"),
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Le => "<=",
            Rel::Nle => "!<=",
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, items: &[Formula], sep: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, g) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{g}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(r, a, b) => write!(f, "{a} {r} {b}"),
            Formula::And(items) => list(f, items, " & "),
            Formula::Or(items) => list(f, items, " | "),
            Formula::Implies(a, b) => write!(f, "({a} => {b})"),
            Formula::Forall(vars, body) => write!(f, "(forall {}. {body})", vars.join(" ")),
        }
    }
}

impl Formula {
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Atom(_, a, b) => 1 + a.size() + b.size(),
            Formula::And(items) | Formula::Or(items) => 1 + items.iter().map(Formula::size).sum::<usize>(),
            Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, body) => 1 + body.size(),
        }
    }
}

// ---------------------------------------------------------------------------
// construction

/// A term network with term labels; `labels[x][y]` is `λ(x, y)`.
#[derive(Clone, Debug)]
struct Net {
    labels: Vec<Vec<Vec<Term>>>,
}

impl Net {
    fn nodes(&self) -> usize {
        self.labels.len()
    }

    fn blank(nodes: usize) -> Net {
        let labels = (0..nodes)
            .map(|x| (0..nodes).map(|y| if x == y { vec![Term::Top, Term::One] } else { vec![Term::Top] }).collect())
            .collect();
        Net { labels }
    }

    fn initial_one(a: &str, b: &str) -> Net {
        let mut n = Net::blank(1);
        n.labels[0][0].extend([Term::var(a), Term::var(b).neg()]);
        n
    }

    fn initial_two(a: &str, b: &str) -> Net {
        let mut n = Net::blank(2);
        n.labels[0][1].push(Term::var(a));
        n.labels[1][0].push(Term::var(b).neg());
        n
    }

    /// `N^{+,x,y,t}`; `y == nodes()` adds a fresh node.
    fn plus(&self, x: usize, y: usize, t: Term) -> Net {
        let mut out = self.clone();
        if y == self.nodes() {
            for row in out.labels.iter_mut() {
                row.push(vec![Term::Top]);
            }
            let mut row = vec![vec![Term::Top]; y];
            row.push(vec![Term::Top, Term::One]);
            out.labels.push(row);
        }
        let cell = &mut out.labels[x][y];
        if !cell.contains(&t) {
            cell.push(t);
        }
        out
    }
}

struct Builder {
    fresh: usize,
    budget: usize,
    n: usize,
    limit: usize,
}

impl Builder {
    fn var(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    fn spend(&mut self, amount: usize) -> Result<(), SigmaError> {
        self.budget += amount;
        if self.budget > self.limit {
            Err(SigmaError::TooLarge { n: self.n, limit: self.limit })
        } else {
            Ok(())
        }
    }

    fn phi0(&mut self, net: &Net) -> Result<Formula, SigmaError> {
        let mut parts = Vec::new();
        for x in 0..net.nodes() {
            for y in 0..net.nodes() {
                for t in &net.labels[x][y] {
                    for t2 in &net.labels[y][x] {
                        parts.push(Formula::Atom(Rel::Ne, t.clone(), t2.clone().neg()));
                    }
                }
            }
        }
        self.spend(parts.len())?;
        Ok(Formula::And(parts))
    }

    fn phi(&mut self, net: &Net, n: usize) -> Result<Formula, SigmaError> {
        if n == 0 {
            return self.phi0(net);
        }
        let nodes = net.nodes();
        let mut parts = Vec::new();
        for x in 0..nodes {
            for y in 0..nodes {
                for t in &net.labels[x][y] {
                    let (a, b) = (self.var(), self.var());
                    let left = self.phi(&net.plus(x, y, Term::var(&a)), n - 1)?;
                    let right = self.phi(&net.plus(x, y, Term::var(&b)), n - 1)?;
                    let cond = Formula::Atom(Rel::Le, t.clone(), Term::var(&a).join(Term::var(&b)));
                    let body = Formula::Implies(Box::new(cond), Box::new(Formula::Or(vec![left, right])));
                    parts.push(Formula::Forall(vec![a, b], Box::new(body)));
                }
            }
        }
        for x in 0..nodes {
            for y in 0..nodes {
                let a = self.var();
                let left = self.phi(&net.plus(x, y, Term::var(&a)), n - 1)?;
                let right = self.phi(&net.plus(y, x, Term::var(&a).neg()), n - 1)?;
                parts.push(Formula::Forall(vec![a], Box::new(Formula::Or(vec![left, right]))));
            }
        }
        for x in 0..nodes {
            for y in 0..nodes {
                for z in 0..nodes {
                    for t in &net.labels[x][y] {
                        for t2 in &net.labels[y][z] {
                            let f = self.phi(&net.plus(x, z, t.clone().comp(t2.clone())), n - 1)?;
                            parts.push(f);
                        }
                    }
                }
            }
        }
        for x in 0..nodes {
            for y in 0..nodes {
                for t in &net.labels[x][y] {
                    let (a, b) = (self.var(), self.var());
                    let mut options = Vec::new();
                    for z in 0..=nodes {
                        let step = net.plus(x, z, Term::var(&a));
                        options.push(self.phi(&step.plus(z, y, Term::var(&b)), n - 1)?);
                    }
                    let cond = Formula::Atom(Rel::Eq, t.clone(), Term::var(&a).comp(Term::var(&b)));
                    let body = Formula::Implies(Box::new(cond), Box::new(Formula::Or(options)));
                    parts.push(Formula::Forall(vec![a, b], Box::new(body)));
                }
            }
        }
        self.spend(parts.len() + 1)?;
        Ok(Formula::And(parts))
    }
}

/// `φₙ(N^{1,a,b})`, exposed for inspecting the base case.
pub fn phi_initial_one(n: usize) -> Result<Formula, SigmaError> {
    let mut b = Builder { fresh: 0, budget: 0, n, limit: DEFAULT_SIGMA_LIMIT };
    b.phi(&Net::initial_one("a", "b"), n)
}

/// σₙ as a formula, bounded by `limit` nodes.
pub fn sigma_formula(n: usize, limit: usize) -> Result<Formula, SigmaError> {
    let mut b = Builder { fresh: 0, budget: 0, n, limit };
    let one = b.phi(&Net::initial_one("a", "b"), n)?;
    let two = b.phi(&Net::initial_two("a", "b"), n)?;
    let cond = Formula::Atom(Rel::Nle, Term::var("a"), Term::var("b"));
    let body = Formula::Implies(Box::new(cond), Box::new(Formula::Or(vec![one, two])));
    Ok(Formula::Forall(vec!["a".into(), "b".into()], Box::new(body)))
}

/// σₙ as text.
pub fn emit_sigma(n: usize) -> Result<String, SigmaError> {
    sigma_formula(n, DEFAULT_SIGMA_LIMIT).map(|f| f.to_string())
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Parser<'s> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SigmaError> {
        Err(SigmaError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), SigmaError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_alphanumeric() && c != '_').unwrap_or(rest.len());
        if len == 0 || !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return None;
        }
        self.pos += len;
        Some(rest[..len].to_string())
    }

    fn term(&mut self) -> Result<Term, SigmaError> {
        if self.eat("~") {
            return Ok(self.term()?.neg());
        }
        if self.eat("[") {
            let a = self.term()?;
            self.skip_ws();
            let op = self.src[self.pos..].chars().next();
            let make: fn(Box<Term>, Box<Term>) -> Term = match op {
                Some(';') => Term::Comp,
                Some('+') => Term::Join,
                Some('*') => Term::Meet,
                _ => return self.err("expected `;`, `+` or `*`"),
            };
            self.pos += 1;
            let b = self.term()?;
            self.expect("]")?;
            return Ok(make(Box::new(a), Box::new(b)));
        }
        match self.ident().as_deref() {
            Some("top") => Ok(Term::Top),
            Some("bot") => Ok(Term::Bot),
            Some("one") => Ok(Term::One),
            Some(v) => Ok(Term::var(v)),
            None => self.err("expected a term"),
        }
    }

    fn rel(&mut self) -> Result<Rel, SigmaError> {
        for (tok, r) in [("!<=", Rel::Nle), ("!=", Rel::Ne), ("<=", Rel::Le), ("=", Rel::Eq)] {
            if self.eat(tok) {
                return Ok(r);
            }
        }
        self.err("expected a relation")
    }

    fn formula(&mut self) -> Result<Formula, SigmaError> {
        self.skip_ws();
        if !self.src[self.pos..].starts_with('(') {
            let save = self.pos;
            match self.ident().as_deref() {
                Some("true") => return Ok(Formula::True),
                Some("false") => return Ok(Formula::False),
                _ => self.pos = save,
            }
            let a = self.term()?;
            let r = self.rel()?;
            let b = self.term()?;
            return Ok(Formula::Atom(r, a, b));
        }
        self.pos += 1;
        let save = self.pos;
        if self.ident().as_deref() == Some("forall") {
            let mut vars = Vec::new();
            while !self.eat(".") {
                match self.ident() {
                    Some(v) => vars.push(v),
                    None => return self.err("expected a variable or `.`"),
                }
            }
            let body = self.formula()?;
            self.expect(")")?;
            return Ok(Formula::Forall(vars, Box::new(body)));
        }
        self.pos = save;
        if self.eat(")") {
            // `()` never occurs in emitted text
            return self.err("empty group");
        }
        let first = self.formula()?;
        if self.eat("=>") {
            let second = self.formula()?;
            self.expect(")")?;
            return Ok(Formula::Implies(Box::new(first), Box::new(second)));
        }
        let mut items = vec![first];
        let sep = if self.eat("&") {
            "&"
        } else if self.eat("|") {
            "|"
        } else {
            self.expect(")")?;
            return Ok(items.pop().expect("one item"));
        };
        loop {
            items.push(self.formula()?);
            if self.eat(")") {
                break;
            }
            self.expect(sep)?;
        }
        Ok(if sep == "&" { Formula::And(items) } else { Formula::Or(items) })
    }
}

/// Parses the concrete syntax produced by [`emit_sigma`].
pub fn parse_formula(src: &str) -> Result<Formula, SigmaError> {
    let mut p = Parser { src, pos: 0 };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// evaluation

enum CTerm {
    Var(usize),
    Const(Elem),
    Neg(Box<CTerm>),
    Comp(Box<CTerm>, Box<CTerm>),
    Join(Box<CTerm>, Box<CTerm>),
    Meet(Box<CTerm>, Box<CTerm>),
}

enum CFormula {
    Const(bool),
    Atom(Rel, CTerm, CTerm),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Forall(Vec<usize>, Box<CFormula>),
}

struct Compiler<'a> {
    alg: &'a FiniteAlgebra,
    scope: HashMap<String, usize>,
    slots: usize,
}

impl Compiler<'_> {
    fn term(&self, t: &Term) -> Result<CTerm, SigmaError> {
        let bin = |a: &Term, b: &Term| -> Result<(Box<CTerm>, Box<CTerm>), SigmaError> {
            Ok((Box::new(self.term(a)?), Box::new(self.term(b)?)))
        };
        Ok(match t {
            Term::Var(v) => CTerm::Var(*self.scope.get(v).ok_or_else(|| SigmaError::FreeVariable(v.clone()))?),
            Term::Top => CTerm::Const(self.alg.top()),
            Term::Bot => CTerm::Const(self.alg.bot()),
            Term::One => CTerm::Const(self.alg.one()),
            Term::Neg(a) => CTerm::Neg(Box::new(self.term(a)?)),
            Term::Comp(a, b) => {
                let (a, b) = bin(a, b)?;
                CTerm::Comp(a, b)
            }
            Term::Join(a, b) => {
                let (a, b) = bin(a, b)?;
                CTerm::Join(a, b)
            }
            Term::Meet(a, b) => {
                let (a, b) = bin(a, b)?;
                CTerm::Meet(a, b)
            }
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula, SigmaError> {
        Ok(match f {
            Formula::True => CFormula::Const(true),
            Formula::False => CFormula::Const(false),
            Formula::Atom(r, a, b) => CFormula::Atom(*r, self.term(a)?, self.term(b)?),
            Formula::And(items) => CFormula::And(items.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Or(items) => CFormula::Or(items.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => CFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Forall(vars, body) => {
                let mut saved = Vec::new();
                let mut slots = Vec::new();
                for v in vars {
                    let slot = self.slots;
                    self.slots += 1;
                    saved.push((v.clone(), self.scope.insert(v.clone(), slot)));
                    slots.push(slot);
                }
                let body = self.formula(body)?;
                for (v, old) in saved.into_iter().rev() {
                    match old {
                        Some(s) => self.scope.insert(v, s),
                        None => self.scope.remove(&v),
                    };
                }
                CFormula::Forall(slots, Box::new(body))
            }
        })
    }
}

fn eval_term(alg: &FiniteAlgebra, t: &CTerm, env: &[Elem]) -> Elem {
    match t {
        CTerm::Var(i) => env[*i],
        CTerm::Const(e) => *e,
        CTerm::Neg(a) => alg.neg(eval_term(alg, a, env)),
        CTerm::Comp(a, b) => alg.comp(eval_term(alg, a, env), eval_term(alg, b, env)),
        CTerm::Join(a, b) => alg.join(eval_term(alg, a, env), eval_term(alg, b, env)),
        CTerm::Meet(a, b) => alg.meet(eval_term(alg, a, env), eval_term(alg, b, env)),
    }
}

fn eval_formula(alg: &FiniteAlgebra, f: &CFormula, env: &mut Vec<Elem>) -> bool {
    match f {
        CFormula::Const(b) => *b,
        CFormula::Atom(r, a, b) => {
            let (a, b) = (eval_term(alg, a, env), eval_term(alg, b, env));
            match r {
                Rel::Eq => a == b,
                Rel::Ne => a != b,
                Rel::Le => alg.leq(a, b),
                Rel::Nle => !alg.leq(a, b),
            }
        }
        CFormula::And(items) => items.iter().all(|g| eval_formula(alg, g, env)),
        CFormula::Or(items) => items.iter().any(|g| eval_formula(alg, g, env)),
        CFormula::Implies(a, b) => !eval_formula(alg, a, env) || eval_formula(alg, b, env),
        CFormula::Forall(slots, body) => forall(alg, slots, body, env),
    }
}

fn forall(alg: &FiniteAlgebra, slots: &[usize], body: &CFormula, env: &mut Vec<Elem>) -> bool {
    let Some((&first, rest)) = slots.split_first() else {
        return eval_formula(alg, body, env);
    };
    (0..alg.size()).all(|e| {
        env[first] = e;
        forall(alg, rest, body, env)
    })
}

/// Truth of a closed formula in `alg`, by trying every assignment.
pub fn evaluate(f: &Formula, alg: &FiniteAlgebra) -> Result<bool, SigmaError> {
    let mut c = Compiler { alg, scope: HashMap::new(), slots: 0 };
    let compiled = c.formula(f)?;
    let mut env = vec![0; c.slots];
    Ok(eval_formula(alg, &compiled, &mut env))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi0_of_initial_one_is_diagonal_disequalities() {
        let f = phi_initial_one(0).unwrap();
        let Formula::And(parts) = &f else { panic!("expected a conjunction") };
        assert_eq!(parts.len(), 16);
        assert!(parts.iter().all(|p| matches!(p, Formula::Atom(Rel::Ne, _, Term::Neg(_)))));
        assert!(f.to_string().contains("a != ~~b"));
    }

    #[test]
    fn sigma_round_trips() {
        for n in 0..=1 {
            let f = sigma_formula(n, DEFAULT_SIGMA_LIMIT).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn variables_are_unique() {
        let text = emit_sigma(1).unwrap();
        let f = parse_formula(&text).unwrap();
        fn binders(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Forall(vs, body) => {
                    out.extend(vs.iter().cloned());
                    binders(body, out);
                }
                Formula::And(items) | Formula::Or(items) => items.iter().for_each(|g| binders(g, out)),
                Formula::Implies(a, b) => {
                    binders(a, out);
                    binders(b, out);
                }
                _ => {}
            }
        }
        let mut names = Vec::new();
        binders(&f, &mut names);
        let count = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), count);
    }

    #[test]
    fn size_limit_is_reported() {
        assert_eq!(sigma_formula(2, 1000), Err(SigmaError::TooLarge { n: 2, limit: 1000 }));
    }

    #[test]
    fn parse_errors_carry_position() {
        assert!(matches!(parse_formula("(a <= b"), Err(SigmaError::Parse { .. })));
        assert!(matches!(parse_formula("a <= [b ? c]"), Err(SigmaError::Parse { .. })));
    }

    #[test]
    fn free_variables_are_rejected() {
        let alg = crate::models::sugihara::sugihara(2);
        let f = parse_formula("a <= top").unwrap();
        assert_eq!(evaluate(&f, &alg), Err(SigmaError::FreeVariable("a".into())));
        let g = parse_formula("(forall a. a <= top)").unwrap();
        assert_eq!(evaluate(&g, &alg), Ok(true));
    }
}
