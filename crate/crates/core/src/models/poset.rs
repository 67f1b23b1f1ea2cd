//! Finite posets with bitset rows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::relation::Relation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset has {0} points; at most 64 are supported")]
    TooLarge(usize),
    #[error("leq pair ({0}, {1}) out of range")]
    OutOfRange(usize, usize),
    #[error("order is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("order is not transitive at ({0}, {1}, {2})")]
    NotTransitive(usize, usize, usize),
}

/// On-disk form: `{"points": [...], "leq": [[i, j], ...]}`; reflexive pairs
/// may be omitted.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawPoset {
    pub points: Vec<String>,
    #[serde(default)]
    pub leq: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poset {
    points: Vec<String>,
    order: Relation,
}

impl Poset {
    /// Validates reflexivity (added), antisymmetry and transitivity.
    pub fn new(raw: &RawPoset) -> Result<Self, PosetError> {
        let n = raw.points.len();
        if n > 64 {
            return Err(PosetError::TooLarge(n));
        }
        let mut order = Relation::identity(n);
        for &[i, j] in &raw.leq {
            if i >= n || j >= n {
                return Err(PosetError::OutOfRange(i, j));
            }
            order.insert(i, j);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && order.contains(i, j) && order.contains(j, i) {
                    return Err(PosetError::NotAntisymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if order.contains(i, j) && order.contains(j, k) && !order.contains(i, k) {
                        return Err(PosetError::NotTransitive(i, j, k));
                    }
                }
            }
        }
        Ok(Poset { points: raw.points.clone(), order })
    }

    fn from_order(order: Relation) -> Self {
        let points = (0..order.len()).map(|i| i.to_string()).collect();
        Poset { points, order }
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let mut order = Relation::empty(n);
        for i in 0..n {
            for j in i..n {
                order.insert(i, j);
            }
        }
        Self::from_order(order)
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_order(Relation::identity(n))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.order.contains(i, j)
    }

    /// The order as a relation on the carrier.
    pub fn order(&self) -> &Relation {
        &self.order
    }

    pub fn to_raw(&self) -> RawPoset {
        RawPoset { points: self.points.clone(), leq: self.order.pairs().map(|(i, j)| [i, j]).collect() }
    }

    /// Every poset on `n` points up to isomorphism (`n ≤ 5`).
    pub fn all_up_to_iso(n: usize) -> Vec<Poset> {
        assert!(n <= 5, "poset enumeration is limited to 5 points");
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i < j).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        // natural labelling: i < j in the order only if i < j as integers
        for mask in 0u32..1 << pairs.len() {
            let mut order = Relation::identity(n);
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    order.insert(i, j);
                }
            }
            if order.compose(&order) != order {
                continue;
            }
            let key = itertools::Itertools::permutations(0..n, n)
                .map(|p| order.permuted(&p).rows().to_vec())
                .min()
                .unwrap_or_default();
            if seen.insert(key) {
                out.push(Self::from_order(order));
            }
        }
        out
    }
}
