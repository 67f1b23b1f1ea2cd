//! Weakening relations over a finite poset and the algebra `wk(X, ≤)`.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use super::poset::Poset;
use super::relation::Relation;
use crate::algebra::{AlgebraError, FiniteAlgebra};

#[derive(Debug, Error)]
pub enum WkError {
    #[error("poset has {points} points; wk enumeration is limited to {max} points")]
    TooManyPoints { points: usize, max: usize },
    #[error("wk(X) has {count} elements, above the bound of {bound}")]
    TooManyElements { count: usize, bound: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Limits for [`build_wk`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WkBound {
    pub max_points: usize,
    pub max_elements: usize,
}

impl Default for WkBound {
    fn default() -> Self {
        WkBound { max_points: 4, max_elements: 1024 }
    }
}

/// `≤ ; R ; ≤`, the least weakening relation containing `r`.
pub fn weakening_closure(p: &Poset, r: &Relation) -> Relation {
    p.order().compose(r).compose(p.order())
}

pub fn is_weakening(p: &Poset, r: &Relation) -> bool {
    weakening_closure(p, r) == *r
}

/// `wk(X)` together with the relation behind each element.
#[derive(Clone, Debug)]
pub struct WkAlgebra {
    pub poset: Poset,
    pub algebra: FiniteAlgebra,
    pub relations: Vec<Relation>,
}

impl WkAlgebra {
    pub fn relation(&self, e: usize) -> &Relation {
        &self.relations[e]
    }

    pub fn element_of(&self, r: &Relation) -> Option<usize> {
        self.relations.iter().position(|x| x == r)
    }
}

/// All weakening relations over `p` contained in `within`, sorted by size
/// then bit pattern.
pub fn weakening_relations(p: &Poset, within: &Relation) -> Vec<Relation> {
    let n = p.len();
    let cells: Vec<(usize, usize)> = within.pairs().collect();
    assert!(cells.len() <= 36, "candidate space too large");
    let mut out: Vec<Relation> = (0u64..1 << cells.len())
        .into_par_iter()
        .map(|bits| {
            Relation::from_pairs(n, cells.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &c)| c))
        })
        .filter(|r| is_weakening(p, r))
        .collect();
    out.sort_by_key(|r| (r.count(), r.to_bits()));
    out
}

/// Builds `wk(X) = (W(X), ∩, ∪, ∅, X², ;, ≤, ∼)` with `∼R = ¬R˘`.
pub fn build_wk(p: &Poset, bound: WkBound) -> Result<WkAlgebra, WkError> {
    build_wk_within(p, &Relation::full(p.len()), bound)
}

/// Weakening relations inside an equivalence `e ⊇ ≤`, with top `e` and
/// `∼R = e ∖ R˘`.
pub fn build_wk_within(p: &Poset, e: &Relation, bound: WkBound) -> Result<WkAlgebra, WkError> {
    if p.len() > bound.max_points {
        return Err(WkError::TooManyPoints { points: p.len(), max: bound.max_points });
    }
    assert!(e.is_equivalence() && p.order().is_subset(e), "top must be an equivalence containing the order");
    let relations = weakening_relations(p, e);
    if relations.len() > bound.max_elements {
        return Err(WkError::TooManyElements { count: relations.len(), bound: bound.max_elements });
    }
    let name = if *e == Relation::full(p.len()) {
        format!("wk({})", p.points().join(","))
    } else {
        format!("wk({}; {:?})", p.points().join(","), e)
    };
    let algebra = algebra_of_relations(&name, p.points(), &relations)?;
    Ok(WkAlgebra { poset: p.clone(), algebra, relations })
}

/// Algebra of a set of relations closed under `∩, ∪, ;, ∼` with `∅` first
/// and the top relation last; `∼R` is the top minus the converse, and the
/// identity is the unit of composition.
pub fn algebra_of_relations(
    name: &str,
    point_names: &[String],
    relations: &[Relation],
) -> Result<FiniteAlgebra, AlgebraError> {
    let m = relations.len();
    let index: HashMap<&Relation, usize> = relations.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let find = |r: &Relation| *index.get(r).expect("relation set is closed");
    let mut leq = vec![false; m * m];
    let mut join = vec![0; m * m];
    let mut meet = vec![0; m * m];
    let comp: Vec<usize> = (0..m * m)
        .into_par_iter()
        .map(|ij| find(&relations[ij / m].compose(&relations[ij % m])))
        .collect();
    for (i, a) in relations.iter().enumerate() {
        for (j, b) in relations.iter().enumerate() {
            leq[i * m + j] = a.is_subset(b);
            join[i * m + j] = find(&a.union(b));
            meet[i * m + j] = find(&a.intersection(b));
        }
    }
    let top = &relations[m - 1];
    let neg = relations.iter().map(|r| find(&r.converse().complement().intersection(top))).collect();
    let one = (0..m)
        .find(|&e| (0..m).all(|s| comp[e * m + s] == s && comp[s * m + e] == s))
        .expect("relation set has a unit");
    let names = relations.iter().map(|r| r.render(point_names)).collect();
    FiniteAlgebra::from_trusted_tables(name, names, leq, join, meet, comp, neg, 0, m - 1, one)
}
