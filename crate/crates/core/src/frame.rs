//! Relevance frames `(F, I, ≤, R, ^)` and the two conversion maps between
//! finite frames and finite algebras.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteAlgebra};
use crate::report::{AxiomReport, Witness};

pub type Point = usize;

/// On-disk frame. `I` lists the points where the identity predicate holds;
/// when `R_is_generators` is set, `R` is saturated under the closure
/// conditions at load time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFrame {
    pub name: String,
    pub points: Vec<String>,
    pub leq: Vec<[usize; 2]>,
    pub hat: Vec<usize>,
    #[serde(rename = "I")]
    pub ident: Vec<usize>,
    #[serde(rename = "R")]
    pub r: Vec<[usize; 3]>,
    #[serde(rename = "R_is_generators", default)]
    pub r_is_generators: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("frame condition `{label}` fails: {witness:?}")]
    Condition { label: String, witness: Witness },
    #[error("{0} is not a downset of the point order")]
    NotADownset(&'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Componentwise-minimal witness `(a, b, c)` of `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MinTriple {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevanceFrame {
    pub name: String,
    pub points: Vec<String>,
    k: usize,
    leq: Vec<bool>,
    hat: Vec<Point>,
    ident: Vec<bool>,
    r: Vec<bool>,
}

pub const FRAME_CONDITIONS: [&str; 6] =
    ["order", "hat-involution", "hat-order-reversing", "unit-left", "unit-right", "closure"];

impl RelevanceFrame {
    /// Frame from full tables, unchecked. `leq` and `r` are row-major.
    pub fn from_parts(
        name: impl Into<String>,
        points: Vec<String>,
        leq: Vec<bool>,
        hat: Vec<Point>,
        ident: Vec<bool>,
        r: Vec<bool>,
    ) -> Self {
        let k = points.len();
        assert_eq!(leq.len(), k * k);
        assert_eq!(hat.len(), k);
        assert_eq!(ident.len(), k);
        assert_eq!(r.len(), k * k * k);
        RelevanceFrame { name: name.into(), points, k, leq, hat, ident, r }
    }

    fn from_raw_unchecked(raw: &RawFrame) -> Result<Self, FrameError> {
        let k = raw.points.len();
        let bad = |what: &str, v: usize| FrameError::Malformed(format!("{what} index {v} out of range"));
        if raw.hat.len() != k {
            return Err(FrameError::Malformed(format!("hat has length {}, expected {k}", raw.hat.len())));
        }
        let mut leq = vec![false; k * k];
        for i in 0..k {
            leq[i * k + i] = true;
        }
        for &[i, j] in &raw.leq {
            if i >= k || j >= k {
                return Err(bad("leq", i.max(j)));
            }
            leq[i * k + j] = true;
        }
        for &h in &raw.hat {
            if h >= k {
                return Err(bad("hat", h));
            }
        }
        let mut ident = vec![false; k];
        for &i in &raw.ident {
            if i >= k {
                return Err(bad("I", i));
            }
            ident[i] = true;
        }
        let mut r = vec![false; k * k * k];
        for &[a, b, c] in &raw.r {
            if a >= k || b >= k || c >= k {
                return Err(bad("R", a.max(b).max(c)));
            }
            r[(a * k + b) * k + c] = true;
        }
        let mut f = RelevanceFrame {
            name: raw.name.clone(),
            points: raw.points.clone(),
            k,
            leq,
            hat: raw.hat.clone(),
            ident,
            r,
        };
        if raw.r_is_generators {
            f.close_r();
        }
        Ok(f)
    }

    /// Loads and validates a raw frame.
    pub fn new(raw: &RawFrame) -> Result<Self, FrameError> {
        let f = Self::from_raw_unchecked(raw)?;
        let report = f.validate();
        if let Some((label, witness)) = report.first_failure() {
            return Err(FrameError::Condition { label: label.to_string(), witness: witness.clone() });
        }
        Ok(f)
    }

    pub fn to_raw(&self) -> RawFrame {
        let k = self.k;
        let mut leq = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if a != b && self.leq(a, b) {
                    leq.push([a, b]);
                }
            }
        }
        RawFrame {
            name: self.name.clone(),
            points: self.points.clone(),
            leq,
            hat: self.hat.clone(),
            ident: (0..k).filter(|&a| self.ident[a]).collect(),
            r: self.triples().map(|(a, b, c)| [a, b, c]).collect(),
            r_is_generators: false,
        }
    }

    /// Saturates `R` under downward closure in the first argument and
    /// upward closure in the other two.
    pub fn close_r(&mut self) {
        let k = self.k;
        let gens: Vec<_> = self.triples().collect();
        let leq = self.leq.clone();
        let le = |x: usize, y: usize| leq[x * k + y];
        for (a, b, c) in gens {
            for a2 in (0..k).filter(|&x| le(x, a)) {
                for b2 in (0..k).filter(|&x| le(b, x)) {
                    for c2 in (0..k).filter(|&x| le(c, x)) {
                        self.r[(a2 * k + b2) * k + c2] = true;
                    }
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    #[inline]
    pub fn leq(&self, a: Point, b: Point) -> bool {
        self.leq[a * self.k + b]
    }

    #[inline]
    pub fn hat(&self, a: Point) -> Point {
        self.hat[a]
    }

    #[inline]
    pub fn ident(&self, a: Point) -> bool {
        self.ident[a]
    }

    #[inline]
    pub fn r(&self, a: Point, b: Point, c: Point) -> bool {
        self.r[(a * self.k + b) * self.k + c]
    }

    pub fn hat_table(&self) -> &[Point] {
        &self.hat
    }

    pub fn ident_table(&self) -> &[bool] {
        &self.ident
    }

    pub fn leq_table(&self) -> &[bool] {
        &self.leq
    }

    pub fn r_table(&self) -> &[bool] {
        &self.r
    }

    pub fn triples(&self) -> impl Iterator<Item = (Point, Point, Point)> + '_ {
        let k = self.k;
        (0..k * k * k).filter(move |&i| self.r[i]).map(move |i| (i / (k * k), (i / k) % k, i % k))
    }

    /// Relevance-frame conditions, stopping at the first failure.
    pub fn validate(&self) -> AxiomReport {
        let k = self.k;
        let mut report = AxiomReport::new();
        let w = |pairs: &[(&str, usize)]| Some(Witness::new(pairs.iter().copied()));

        let order = (|| {
            for a in 0..k {
                for b in 0..k {
                    if a != b && self.leq(a, b) && self.leq(b, a) {
                        return w(&[("a", a), ("b", b)]);
                    }
                    for c in 0..k {
                        if self.leq(a, b) && self.leq(b, c) && !self.leq(a, c) {
                            return w(&[("a", a), ("b", b), ("c", c)]);
                        }
                    }
                }
            }
            None
        })();
        let involution = (0..k).find(|&a| self.hat(self.hat(a)) != a).and_then(|a| w(&[("a", a)]));
        let reversing = (|| {
            for a in 0..k {
                for b in 0..k {
                    if self.leq(a, b) && !self.leq(self.hat(b), self.hat(a)) {
                        return w(&[("a", a), ("b", b)]);
                    }
                }
            }
            None
        })();
        let unit = |left: bool| {
            for a in 0..k {
                for b in 0..k {
                    let exists = (0..k).any(|e| {
                        self.ident(e) && if left { self.r(a, e, b) } else { self.r(a, b, e) }
                    });
                    if exists != self.leq(a, b) {
                        return w(&[("a", a), ("b", b)]);
                    }
                }
            }
            None
        };
        let closure = (|| {
            for (a, b, c) in self.triples() {
                for x in 0..k {
                    if self.leq(x, a) && !self.r(x, b, c) {
                        return w(&[("a", x), ("b", b), ("c", c)]);
                    }
                    if self.leq(b, x) && !self.r(a, x, c) {
                        return w(&[("a", a), ("b", x), ("c", c)]);
                    }
                    if self.leq(c, x) && !self.r(a, b, x) {
                        return w(&[("a", a), ("b", b), ("c", x)]);
                    }
                }
            }
            None
        })();

        let results = [order, involution, reversing, unit(true), unit(false), closure];
        for (label, result) in FRAME_CONDITIONS.iter().zip(results) {
            let failed = result.is_some();
            report.record(*label, result);
            if failed {
                break;
            }
        }
        report
    }

    /// All `(a, b, c)` with `R(a,b,c)` and `(b, c)` componentwise minimal.
    pub fn r_min(&self, a: Point) -> Vec<MinTriple> {
        let k = self.k;
        let mut out = Vec::new();
        for b in 0..k {
            for c in 0..k {
                if !self.r(a, b, c) {
                    continue;
                }
                let minimal = (0..k).all(|b2| {
                    (0..k).all(|c2| {
                        !(self.r(a, b2, c2) && self.leq(b2, b) && self.leq(c2, c)) || (b2 == b && c2 == c)
                    })
                });
                if minimal {
                    out.push(MinTriple { a, b, c });
                }
            }
        }
        out
    }

    pub fn is_r_min(&self, a: Point, b: Point, c: Point) -> bool {
        self.r_min(a).contains(&MinTriple { a, b, c })
    }

    /// Downsets of the point order as bitmasks, sorted by size then mask.
    pub fn downsets(&self) -> Vec<u64> {
        downsets_of(self.k, &self.leq)
    }
}

/// Checks the relevance-frame conditions on raw input; malformed input is
/// an error rather than a failing condition.
pub fn validate_frame(raw: &RawFrame) -> Result<AxiomReport, FrameError> {
    Ok(RelevanceFrame::from_raw_unchecked(raw)?.validate())
}

/// All downsets of a poset on `k ≤ 24` points.
pub fn downsets_of(k: usize, leq: &[bool]) -> Vec<u64> {
    assert!(k <= 24, "too many points to enumerate downsets");
    let below: Vec<u64> =
        (0..k).map(|a| (0..k).filter(|&b| leq[b * k + a]).fold(0u64, |m, b| m | 1 << b)).collect();
    let mut out: Vec<u64> = (0u64..1 << k)
        .filter(|&s| (0..k).all(|a| s >> a & 1 == 0 || below[a] & !s == 0))
        .collect();
    out.sort_by_key(|&s| (s.count_ones(), s));
    out
}

/// Join-irreducible frame of a finite algebra: points are the
/// join-irreducibles, `I(a) ⟺ a ≤ 1` and `R(a,b,c) ⟺ a ≤ b;c`.
pub fn algebra_to_frame(alg: &FiniteAlgebra) -> RelevanceFrame {
    let jis: Vec<Elem> = alg.join_irreducibles().iter().map(|j| j.index).collect();
    let k = jis.len();
    let pos = |e: Elem| jis.iter().position(|&j| j == e).expect("hat is join-irreducible");
    let mut leq = vec![false; k * k];
    let mut r = vec![false; k * k * k];
    for (i, &a) in jis.iter().enumerate() {
        for (j, &b) in jis.iter().enumerate() {
            leq[i * k + j] = alg.leq(a, b);
            for (l, &c) in jis.iter().enumerate() {
                r[(i * k + j) * k + l] = alg.leq(a, alg.comp(b, c));
            }
        }
    }
    RelevanceFrame {
        name: alg.name().to_string(),
        points: jis.iter().map(|&j| alg.element_name(j).to_string()).collect(),
        k,
        leq,
        hat: jis.iter().map(|&a| pos(alg.hat_of(a))).collect(),
        ident: jis.iter().map(|&a| alg.leq(a, alg.one())).collect(),
        r,
    }
}

fn downset_name(frame: &RelevanceFrame, set: u64) -> String {
    if set == 0 {
        return "bot".to_string();
    }
    let k = frame.k;
    let maximal: Vec<&str> = (0..k)
        .filter(|&a| set >> a & 1 == 1)
        .filter(|&a| !(0..k).any(|b| b != a && set >> b & 1 == 1 && frame.leq(a, b)))
        .map(|a| frame.points[a].as_str())
        .collect();
    maximal.join("+")
}

/// Algebra of downsets of a frame.
pub fn frame_to_algebra(frame: &RelevanceFrame) -> Result<FiniteAlgebra, FrameError> {
    let k = frame.k;
    let downs = frame.downsets();
    let m = downs.len();
    let index = |s: u64| downs.binary_search_by_key(&(s.count_ones(), s), |&d| (d.count_ones(), d));
    let idx = |s: u64, what: &'static str| index(s).map_err(|_| FrameError::NotADownset(what));
    let bits = |s: u64| (0..k).filter(move |&a| s >> a & 1 == 1);

    let mut leq = vec![false; m * m];
    let mut join = vec![0; m * m];
    let mut meet = vec![0; m * m];
    let mut comp = vec![0; m * m];
    for (i, &s) in downs.iter().enumerate() {
        for (j, &t) in downs.iter().enumerate() {
            leq[i * m + j] = s & !t == 0;
            join[i * m + j] = idx(s | t, "join")?;
            meet[i * m + j] = idx(s & t, "meet")?;
            let mut c = 0u64;
            for a in 0..k {
                if bits(s).any(|b| bits(t).any(|cc| frame.r(a, b, cc))) {
                    c |= 1 << a;
                }
            }
            comp[i * m + j] = idx(c, "composition")?;
        }
    }
    let neg = downs
        .iter()
        .map(|&s| {
            let n = (0..k).filter(|&a| s >> frame.hat(a) & 1 == 0).fold(0u64, |acc, a| acc | 1 << a);
            idx(n, "negation")
        })
        .collect::<Result<Vec<_>, _>>()?;
    let one_set = (0..k).filter(|&a| frame.ident(a)).fold(0u64, |acc, a| acc | 1 << a);
    let one = idx(one_set, "identity")?;
    let names = downs.iter().map(|&s| downset_name(frame, s)).collect();
    Ok(FiniteAlgebra::from_trusted_tables(
        frame.name.clone(),
        names,
        leq,
        join,
        meet,
        comp,
        neg,
        0,
        m - 1,
        one,
    )?)
}

/// Frame of principal prime filters `↑s`, built with the filter-level
/// definitions: `U ≤ V ⟺ V ⊆ U`, `Û = {∼s | s ∉ U}`, `I(U) ⟺ 1 ∈ U`,
/// `R(U,V,W) ⟺ ∀v∈V, w∈W: v;w ∈ U`. For finite algebras every prime filter
/// is principal, and the result is asserted isomorphic to
/// [`algebra_to_frame`].
pub fn prime_filter_frame(alg: &FiniteAlgebra) -> RelevanceFrame {
    let m = alg.size();
    let up = |s: Elem| -> Vec<bool> { (0..m).map(|t| alg.leq(s, t)).collect() };
    let is_prime = |f: &[bool]| {
        !f[alg.bot()]
            && (0..m).all(|s| (0..m).all(|t| !f[alg.join(s, t)] || f[s] || f[t]))
    };
    let filters: Vec<(Elem, Vec<bool>)> =
        (0..m).map(|s| (s, up(s))).filter(|(_, f)| is_prime(f)).collect();
    let k = filters.len();
    let find = |f: &[bool]| filters.iter().position(|(_, g)| g == f).expect("hat filter is prime");
    let subset = |a: &[bool], b: &[bool]| a.iter().zip(b).all(|(x, y)| !x || *y);

    let mut leq = vec![false; k * k];
    let mut r = vec![false; k * k * k];
    for (i, (_, u)) in filters.iter().enumerate() {
        for (j, (_, v)) in filters.iter().enumerate() {
            leq[i * k + j] = subset(v, u);
            for (l, (_, w)) in filters.iter().enumerate() {
                r[(i * k + j) * k + l] = (0..m)
                    .filter(|&x| v[x])
                    .all(|x| (0..m).filter(|&y| w[y]).all(|y| u[alg.comp(x, y)]));
            }
        }
    }
    let hat = filters
        .iter()
        .map(|(_, u)| {
            let mut h = vec![false; m];
            for s in (0..m).filter(|&s| !u[s]) {
                h[alg.neg(s)] = true;
            }
            find(&h)
        })
        .collect();
    let frame = RelevanceFrame {
        name: alg.name().to_string(),
        points: filters.iter().map(|(s, _)| format!("^{}", alg.element_name(*s))).collect(),
        k,
        leq,
        hat,
        ident: filters.iter().map(|(_, u)| u[alg.one()]).collect(),
        r,
    };
    assert!(
        find_frame_isomorphism(&frame, &algebra_to_frame(alg)).is_some(),
        "prime filter frame of {} differs from its join-irreducible frame",
        alg.name()
    );
    frame
}

fn point_invariant(f: &RelevanceFrame, a: Point) -> [usize; 7] {
    let k = f.k;
    let down = (0..k).filter(|&b| f.leq(b, a)).count();
    let up = (0..k).filter(|&b| f.leq(a, b)).count();
    let mut r1 = 0;
    let mut r2 = 0;
    let mut r3 = 0;
    for x in 0..k {
        for y in 0..k {
            r1 += f.r(a, x, y) as usize;
            r2 += f.r(x, a, y) as usize;
            r3 += f.r(x, y, a) as usize;
        }
    }
    [down, up, f.ident(a) as usize, (f.hat(a) == a) as usize, r1, r2, r3]
}

/// Bijection `map[a]` from points of `f` to points of `g` preserving
/// order, hat, `I` and `R`, by backtracking with an invariant prefilter.
pub fn find_frame_isomorphism(f: &RelevanceFrame, g: &RelevanceFrame) -> Option<Vec<Point>> {
    if f.k != g.k {
        return None;
    }
    let k = f.k;
    let fi: Vec<_> = (0..k).map(|a| point_invariant(f, a)).collect();
    let gi: Vec<_> = (0..k).map(|a| point_invariant(g, a)).collect();
    let mut fs = fi.clone();
    let mut gs = gi.clone();
    fs.sort();
    gs.sort();
    if fs != gs {
        return None;
    }
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; k];
    fn go(
        f: &RelevanceFrame,
        g: &RelevanceFrame,
        fi: &[[usize; 7]],
        gi: &[[usize; 7]],
        i: usize,
        map: &mut Vec<Point>,
        used: &mut Vec<bool>,
    ) -> bool {
        let k = f.k;
        if i == k {
            return (0..k).all(|a| g.hat(map[a]) == map[f.hat(a)]);
        }
        for t in 0..k {
            if used[t] || fi[i] != gi[t] || f.ident(i) != g.ident(t) {
                continue;
            }
            map[i] = t;
            let ok = (0..=i).all(|a| {
                f.leq(a, i) == g.leq(map[a], t)
                    && f.leq(i, a) == g.leq(t, map[a])
                    && (f.hat(i) > i || g.hat(t) == map[f.hat(i)])
                    && (f.hat(a) != i || g.hat(map[a]) == t)
                    && (0..=i).all(|b| {
                        f.r(i, a, b) == g.r(t, map[a], map[b])
                            && f.r(a, i, b) == g.r(map[a], t, map[b])
                            && f.r(a, b, i) == g.r(map[a], map[b], t)
                    })
            });
            if ok {
                used[t] = true;
                if go(f, g, fi, gi, i + 1, map, used) {
                    return true;
                }
                used[t] = false;
            }
        }
        map[i] = usize::MAX;
        false
    }
    go(f, g, &fi, &gi, 0, &mut map, &mut used).then_some(map)
}

/// Isomorphism-invariant key of a frame: the point invariants in sorted
/// order followed by the lexicographically least encoding of
/// `(≤, ^, I, R)` over all point orders compatible with that sorting.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrameKey(pub Vec<u8>);

impl FrameKey {
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Encodes `f` with points listed in `order` (order[new] = old).
pub fn encode_frame(f: &RelevanceFrame, order: &[Point]) -> Vec<u8> {
    let k = f.k;
    let mut inv = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    let mut bits = Vec::with_capacity(k * k + k + k * k * k);
    for &a in order {
        for &b in order {
            bits.push(f.leq(a, b));
        }
    }
    for &a in order {
        bits.push(f.ident(a));
    }
    for &a in order {
        for &b in order {
            for &c in order {
                bits.push(f.r(a, b, c));
            }
        }
    }
    let mut out = vec![k as u8];
    out.extend(order.iter().map(|&a| inv[f.hat(a)] as u8));
    out.extend(bits.chunks(8).map(|ch| ch.iter().fold(0u8, |acc, &b| acc << 1 | b as u8)));
    out
}

pub fn canonical_frame_key(f: &RelevanceFrame) -> FrameKey {
    let k = f.k;
    let inv: Vec<_> = (0..k).map(|a| point_invariant(f, a)).collect();
    let mut sorted: Vec<Point> = (0..k).collect();
    sorted.sort_by_key(|&a| inv[a]);
    // blocks of equal invariants; permute within blocks only
    let mut blocks: Vec<Vec<Point>> = Vec::new();
    for &a in &sorted {
        match blocks.last_mut() {
            Some(b) if inv[b[0]] == inv[a] => b.push(a),
            _ => blocks.push(vec![a]),
        }
    }
    let best = blocks
        .iter()
        .map(|b| b.iter().copied().permutations(b.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|choice| encode_frame(f, &choice.concat()))
        .min()
        .unwrap_or_else(|| encode_frame(f, &[]));
    let mut key: Vec<u8> = Vec::new();
    for a in &sorted {
        key.extend(inv[*a].iter().map(|&x| x as u8));
    }
    key.extend(best);
    FrameKey(key)
}
