//! Term networks (labels are sets of algebra elements) and frame networks
//! (labels are frame points).

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra};
use crate::frame::{Point, RelevanceFrame};

/// Largest algebra a term network can label (labels are 128-bit sets).
pub const MAX_TERM_ELEMENTS: usize = 128;

/// A set of elements as a bitmask.
pub type ElemSet = u128;

pub fn elem_set(items: impl IntoIterator<Item = Elem>) -> ElemSet {
    items.into_iter().fold(0, |acc, e| acc | 1 << e)
}

pub fn elems_of(s: ElemSet) -> impl Iterator<Item = Elem> {
    (0..MAX_TERM_ELEMENTS).filter(move |&e| s >> e & 1 == 1)
}

/// A network whose labels are finite sets of elements; `labels[x * n + y]`
/// is `λ(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermNetwork {
    pub nodes: usize,
    pub labels: Vec<ElemSet>,
}

impl TermNetwork {
    /// `nodes` nodes with `1 ∈ λ(x,x)` and `⊤ ∈ λ(x,y)` and nothing else.
    pub fn blank(alg: &FiniteAlgebra, nodes: usize) -> Self {
        let top = 1 << alg.top();
        let labels = (0..nodes * nodes).map(|xy| if xy / nodes == xy % nodes { top | 1 << alg.one() } else { top }).collect();
        TermNetwork { nodes, labels }
    }

    /// One node with `λ(x,x) = {⊤, 1, a, ∼b}`.
    pub fn initial_one(alg: &FiniteAlgebra, a: Elem, b: Elem) -> Self {
        let mut n = Self::blank(alg, 1);
        n.labels[0] |= 1 << a | 1 << alg.neg(b);
        n
    }

    /// Two nodes with `λ(x,y) = {⊤, a}` and `λ(y,x) = {⊤, ∼b}`.
    pub fn initial_two(alg: &FiniteAlgebra, a: Elem, b: Elem) -> Self {
        let mut n = Self::blank(alg, 2);
        n.labels[1] |= 1 << a;
        n.labels[2] |= 1 << alg.neg(b);
        n
    }

    pub fn label(&self, x: usize, y: usize) -> ElemSet {
        self.labels[x * self.nodes + y]
    }

    pub fn contains(&self, x: usize, y: usize, e: Elem) -> bool {
        self.label(x, y) >> e & 1 == 1
    }

    /// Same network with `e` added to `λ(x, y)`.
    pub fn with(&self, x: usize, y: usize, e: Elem) -> Self {
        let mut out = self.clone();
        out.labels[x * self.nodes + y] |= 1 << e;
        out
    }

    /// Adds a fresh node `z` with `λ(z,z) = {1, ⊤}` and `⊤` elsewhere.
    pub fn with_new_node(&self, alg: &FiniteAlgebra) -> Self {
        let n = self.nodes;
        let m = n + 1;
        let top: ElemSet = 1 << alg.top();
        let mut labels = vec![top; m * m];
        for x in 0..n {
            for y in 0..n {
                labels[x * m + y] = self.labels[x * n + y];
            }
        }
        labels[n * m + n] |= 1 << alg.one();
        TermNetwork { nodes: m, labels }
    }

    /// Least relabelling over all node orders (only for small networks).
    pub fn canonical(&self) -> Self {
        let n = self.nodes;
        (0..n)
            .permutations(n)
            .map(|p| TermNetwork { nodes: n, labels: (0..n * n).map(|xy| self.label(p[xy / n], p[xy % n])).collect() })
            .min()
            .unwrap_or_else(|| self.clone())
    }

    pub fn label_names(&self, alg: &FiniteAlgebra) -> Vec<Vec<Vec<String>>> {
        (0..self.nodes)
            .map(|x| {
                (0..self.nodes)
                    .map(|y| elems_of(self.label(x, y)).map(|e| alg.element_name(e).to_string()).collect())
                    .collect()
            })
            .collect()
    }
}

/// `λ(x,y) ∩ {∼t | t ∈ λ(y,x)} = ∅` for all `x, y` (including `x = y`).
pub fn term_consistent(n: &TermNetwork, alg: &FiniteAlgebra) -> bool {
    term_inconsistency(n, alg).is_none()
}

/// A clash `(x, y, t)` with `t ∈ λ(x,y)` and `∼t ∈ λ(y,x)`.
pub fn term_inconsistency(n: &TermNetwork, alg: &FiniteAlgebra) -> Option<(usize, usize, Elem)> {
    for x in 0..n.nodes {
        for y in x..n.nodes {
            let back = negated(alg, n.label(y, x));
            if let Some(t) = elems_of(n.label(x, y) & back).next() {
                return Some((x, y, t));
            }
        }
    }
    None
}

pub(crate) fn negated(alg: &FiniteAlgebra, s: ElemSet) -> ElemSet {
    elems_of(s).fold(0, |acc, t| acc | 1 << alg.neg(t))
}

/// A frame network; `labels[x * nodes + y]` is `λ(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrameNetwork {
    pub nodes: usize,
    pub labels: Vec<Point>,
}

impl FrameNetwork {
    pub fn new(nodes: usize, labels: Vec<Point>) -> Self {
        assert_eq!(labels.len(), nodes * nodes);
        FrameNetwork { nodes, labels }
    }

    pub fn label(&self, x: usize, y: usize) -> Point {
        self.labels[x * self.nodes + y]
    }

    /// The subnetwork on `sub`, nodes renumbered in the given order.
    pub fn restrict(&self, sub: &[usize]) -> Self {
        let m = sub.len();
        FrameNetwork { nodes: m, labels: (0..m * m).map(|ij| self.label(sub[ij / m], sub[ij % m])).collect() }
    }

    /// Least relabelling over all node orders.
    pub fn canonical(&self) -> Self {
        let n = self.nodes;
        (0..n).permutations(n).map(|p| self.restrict(&p)).min().unwrap_or_else(|| self.clone())
    }

    /// Whether some edge (possibly a loop) carries `a`.
    pub fn has_label(&self, a: Point) -> bool {
        self.labels.contains(&a)
    }

    pub fn render(&self, f: &RelevanceFrame) -> String {
        (0..self.nodes)
            .map(|x| (0..self.nodes).map(|y| f.points[self.label(x, y)].as_str()).join(" "))
            .join(" | ")
    }
}

impl fmt::Display for FrameNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.labels.chunks(self.nodes.max(1)).collect::<Vec<_>>())
    }
}

/// Why a frame network is inconsistent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrameClash {
    /// `λ(x,y) ≠ hat(λ(y,x))`.
    Converse { x: usize, y: usize },
    /// `¬R(λ(x,y), λ(x,z), λ(z,y))`.
    Triangle { x: usize, y: usize, z: usize },
    /// `¬I(λ(x,x))`.
    Identity { x: usize },
}

pub fn frame_inconsistency(n: &FrameNetwork, f: &RelevanceFrame) -> Option<FrameClash> {
    let m = n.nodes;
    for x in 0..m {
        if !f.ident(n.label(x, x)) {
            return Some(FrameClash::Identity { x });
        }
        for y in 0..m {
            if n.label(x, y) != f.hat(n.label(y, x)) {
                return Some(FrameClash::Converse { x, y });
            }
        }
    }
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if !f.r(n.label(x, y), n.label(x, z), n.label(z, y)) {
                    return Some(FrameClash::Triangle { x, y, z });
                }
            }
        }
    }
    None
}

/// `λ(x,y) = hat(λ(y,x))`, `R(λ(x,y), λ(x,z), λ(z,y))` and `I(λ(x,x))`.
pub fn frame_consistent(n: &FrameNetwork, f: &RelevanceFrame) -> bool {
    frame_inconsistency(n, f).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::algebra_to_frame;
    use crate::models::point_algebra::s4_subalgebra;
    use crate::models::{build_wk, Poset, WkBound};

    fn wk2() -> FiniteAlgebra {
        build_wk(&Poset::chain(2), WkBound::default()).unwrap().algebra
    }

    #[test]
    fn initial_two_for_incomparable_pair_is_consistent() {
        let a = wk2();
        for s in 0..a.size() {
            for t in 0..a.size() {
                if !a.leq(s, t) {
                    assert!(term_consistent(&TermNetwork::initial_two(&a, s, t), &a));
                }
            }
        }
    }

    #[test]
    fn clash_is_detected() {
        let a = wk2();
        let s = 2;
        let n = TermNetwork::blank(&a, 2).with(0, 1, s).with(1, 0, a.neg(s));
        assert!(!term_consistent(&n, &a));
        assert_eq!(term_inconsistency(&n, &a), Some((0, 1, s)));
    }

    #[test]
    fn initial_one_with_equal_pair_clashes() {
        let a = wk2();
        for s in 0..a.size() {
            assert!(!term_consistent(&TermNetwork::initial_one(&a, s, s), &a));
        }
    }

    #[test]
    fn frame_network_checks() {
        let s4 = s4_subalgebra();
        let f = algebra_to_frame(&s4);
        // points: the join-irreducibles <, ≤, ⊤ of {∅,<,≤,⊤}
        let p = |name: &str| f.points.iter().position(|x| x == name).unwrap();
        let (lt, le, top) = (p("<"), p("<="), p("T"));
        assert_eq!(f.hat(lt), top);
        let two = FrameNetwork::new(2, vec![le, lt, top, le]);
        assert!(frame_consistent(&two, &f));
        let skew = FrameNetwork::new(2, vec![le, lt, lt, le]);
        assert_eq!(frame_inconsistency(&skew, &f), Some(FrameClash::Converse { x: 0, y: 1 }));
        // x < z < y but λ(x,y) = ⊤, and ⊤ ≰ <;< = <
        let tri = FrameNetwork::new(3, vec![le, top, lt, lt, le, top, top, lt, le]);
        assert!(matches!(frame_inconsistency(&tri, &f), Some(FrameClash::Triangle { .. })));
        let fixed = FrameNetwork::new(3, vec![le, lt, lt, top, le, top, top, lt, le]);
        assert!(frame_consistent(&fixed, &f));
    }
}
