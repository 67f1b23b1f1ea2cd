//! Isomorph-free enumeration of finite algebras through their frames.
//!
//! A finite algebra is determined up to isomorphism by its frame
//! `(P, ^, I, R)`. The search runs over posets `P` of join-irreducibles
//! whose downset lattice is small enough, then order-reversing involutions
//! `^`, downsets `I`, and finally the map `(b, c) ↦ {a | R(a,b,c)}`, which
//! must be downset-valued, monotone, and satisfy the two unit conditions.
//! Each frame is turned into its algebra, filtered by the profile, and
//! deduplicated by the canonical frame key.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::axioms::AxiomProfile;
use crate::frame::{algebra_to_frame, canonical_frame_key, downsets_of, frame_to_algebra, FrameKey, Point, RelevanceFrame};

pub const DEFAULT_MAX_SIZE: usize = 8;

#[derive(Clone, Debug)]
pub struct EnumerationTask {
    pub max_size: usize,
    pub profile: AxiomProfile,
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum FinderError {
    #[error("size {requested} is above the enumeration bound {bound}")]
    TooLarge { requested: usize, bound: usize },
    #[error("size must be at least 1")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// One isomorphism class found by [`enumerate`].
#[derive(Clone, Debug)]
pub struct Found {
    pub key: FrameKey,
    pub frame: RelevanceFrame,
    pub algebra: FiniteAlgebra,
}

/// Isomorphism-invariant key of an algebra: the canonical key of its frame.
/// Constants are fixed by the frame, so only points are permuted.
pub fn canonical_form(alg: &FiniteAlgebra) -> FrameKey {
    canonical_frame_key(&algebra_to_frame(alg))
}

/// A poset on points `0..k` given by its row-major order table, labelled
/// so that `a ≤ b` implies `a ≤ b` as integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointPoset {
    pub k: usize,
    pub leq: Vec<bool>,
}

impl PointPoset {
    fn le(&self, a: Point, b: Point) -> bool {
        self.leq[a * self.k + b]
    }

    fn key(&self) -> Vec<bool> {
        let k = self.k;
        (0..k)
            .permutations(k)
            .map(|p| (0..k * k).map(|ij| self.leq[p[ij / k] * k + p[ij % k]]).collect::<Vec<_>>())
            .min()
            .unwrap_or_default()
    }
}

/// Posets up to isomorphism whose downset lattice has at most `max_size`
/// elements. Every poset has a linear extension, so extending by a new
/// point above an arbitrary downset of the previous points reaches all of
/// them.
pub fn join_irreducible_posets(max_size: usize) -> Vec<PointPoset> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut frontier = vec![PointPoset { k: 0, leq: Vec::new() }];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in frontier {
            if downsets_of(p.k, &p.leq).len() > max_size {
                continue;
            }
            if !seen.insert((p.k, p.key())) {
                continue;
            }
            let k = p.k;
            for d in downsets_of(k, &p.leq) {
                let k2 = k + 1;
                let mut leq = vec![false; k2 * k2];
                for a in 0..k {
                    for b in 0..k {
                        leq[a * k2 + b] = p.le(a, b);
                    }
                    leq[a * k2 + k] = d >> a & 1 == 1;
                }
                leq[k * k2 + k] = true;
                next.push(PointPoset { k: k2, leq });
            }
            out.push(p);
        }
        frontier = next;
    }
    out
}

/// Order-reversing involutions of a poset.
pub fn order_reversing_involutions(p: &PointPoset) -> Vec<Vec<Point>> {
    let k = p.k;
    let mut out = Vec::new();
    let mut hat = vec![usize::MAX; k];
    fn go(p: &PointPoset, hat: &mut Vec<Point>, out: &mut Vec<Vec<Point>>) {
        let k = p.k;
        let Some(a) = (0..k).find(|&a| hat[a] == usize::MAX) else {
            let reversing = (0..k).all(|a| (0..k).all(|b| !p.le(a, b) || p.le(hat[b], hat[a])));
            if reversing {
                out.push(hat.clone());
            }
            return;
        };
        for b in a..k {
            if hat[b] != usize::MAX {
                continue;
            }
            hat[a] = b;
            hat[b] = a;
            go(p, hat, out);
            hat[a] = usize::MAX;
            hat[b] = usize::MAX;
        }
    }
    go(p, &mut hat, &mut out);
    out
}

/// All ternary relations `R` over `(P, I)` that are downward closed in the
/// first argument, upward closed in the others, and satisfy both unit
/// conditions; returned as `(b, c) ↦ downset` tables. With `associative`,
/// only associative ones, pruned as soon as a violation is determined.
pub fn composition_tables(p: &PointPoset, ident: u64, associative: bool) -> Vec<Vec<u64>> {
    let k = p.k;
    let below: Vec<u64> = (0..k).map(|a| (0..k).filter(|&b| p.le(b, a)).fold(0u64, |m, b| m | 1 << b)).collect();
    // the unit conditions bound R(a, e, c) with I(e) by a ≤ c
    let upper: Vec<u64> = (0..k * k)
        .map(|bc| {
            let (b, c) = (bc / k, bc % k);
            let mut u = !0u64;
            if ident >> b & 1 == 1 {
                u &= below[c];
            }
            if ident >> c & 1 == 1 {
                u &= below[b];
            }
            u
        })
        .collect();
    let mut search = TableSearch {
        p,
        k,
        downs: downsets_of(k, &p.leq),
        below,
        units: (0..k).filter(|&e| ident >> e & 1 == 1).collect(),
        upper,
        associative,
        table: vec![0; k * k],
        out: Vec::new(),
    };
    search.go(0);
    search.out
}

struct TableSearch<'a> {
    p: &'a PointPoset,
    k: usize,
    downs: Vec<u64>,
    below: Vec<u64>,
    units: Vec<Point>,
    upper: Vec<u64>,
    associative: bool,
    table: Vec<u64>,
    out: Vec<Vec<u64>>,
}

impl TableSearch<'_> {
    /// Entries `0..assigned` of the table are fixed.
    fn consistent(&self, assigned: usize) -> bool {
        let k = self.k;
        let t = &self.table;
        let known = |b: usize, c: usize| b * k + c < assigned;
        let units_known = |f: &dyn Fn(Point) -> bool| self.units.iter().all(|&e| f(e));
        for c in 0..k {
            if units_known(&|e| known(e, c)) && self.units.iter().fold(0, |acc, &e| acc | t[e * k + c]) != self.below[c] {
                return false;
            }
            if units_known(&|e| known(c, e)) && self.units.iter().fold(0, |acc, &e| acc | t[c * k + e]) != self.below[c] {
                return false;
            }
        }
        if !self.associative {
            return true;
        }
        let bits = |s: u64| (0..k).filter(move |&x| s >> x & 1 == 1);
        for b in 0..k {
            for c in 0..k {
                if !known(b, c) {
                    continue;
                }
                for d in 0..k {
                    if !known(c, d) {
                        continue;
                    }
                    let left = bits(t[b * k + c]);
                    let right = bits(t[c * k + d]);
                    if left.clone().all(|x| known(x, d)) && right.clone().all(|y| known(b, y)) {
                        let l = left.fold(0, |acc, x| acc | t[x * k + d]);
                        let r = right.fold(0, |acc, y| acc | t[b * k + y]);
                        if l != r {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn go(&mut self, i: usize) {
        let k = self.k;
        if i == k * k {
            self.out.push(self.table.clone());
            return;
        }
        let (b, c) = (i / k, i % k);
        // every (b', c') ≤ (b, c) comes earlier in row-major order
        let mut lower = 0u64;
        for b2 in 0..=b {
            for c2 in 0..k {
                if (b2, c2) < (b, c) && self.p.le(b2, b) && self.p.le(c2, c) {
                    lower |= self.table[b2 * k + c2];
                }
            }
        }
        for di in 0..self.downs.len() {
            let d = self.downs[di];
            if d & lower == lower && d & !self.upper[i] == 0 {
                self.table[i] = d;
                if self.consistent(i + 1) {
                    self.go(i + 1);
                }
            }
        }
        self.table[i] = 0;
    }
}

pub(crate) fn frame_from_table(p: &PointPoset, hat: &[Point], ident: u64, table: &[u64]) -> RelevanceFrame {
    let k = p.k;
    let mut r = vec![false; k * k * k];
    for a in 0..k {
        for bc in 0..k * k {
            r[a * k * k + bc] = table[bc] >> a & 1 == 1;
        }
    }
    RelevanceFrame::from_parts(
        "",
        (0..k).map(|a| format!("p{a}")).collect(),
        p.leq.clone(),
        hat.to_vec(),
        (0..k).map(|a| ident >> a & 1 == 1).collect(),
        r,
    )
}

/// Every frame over `(P, ^, I)` whose algebra meets `profile`, keyed by
/// canonical form.
pub fn algebras_over(p: &PointPoset, hat: &[Point], ident: u64, profile: &AxiomProfile) -> BTreeMap<FrameKey, Found> {
    let mut out = BTreeMap::new();
    for table in composition_tables(p, ident, profile.associativity) {
        let frame = frame_from_table(p, hat, ident, &table);
        let algebra = frame_to_algebra(&frame).expect("validated frame gives an algebra");
        if profile.admits(&algebra) {
            let key = canonical_frame_key(&frame);
            out.entry(key.clone()).or_insert(Found { key, frame, algebra });
        }
    }
    out
}

/// All algebras with at most `max_size` elements satisfying the profile, up
/// to isomorphism, sorted by size then canonical key.
pub fn enumerate_with_bound(task: &EnumerationTask, bound: usize) -> Result<Vec<Found>, FinderError> {
    if task.max_size == 0 {
        return Err(FinderError::Empty);
    }
    if task.max_size > bound {
        return Err(FinderError::TooLarge { requested: task.max_size, bound });
    }
    let mut jobs = Vec::new();
    for p in join_irreducible_posets(task.max_size) {
        let k = p.k;
        let idents: Vec<u64> = downsets_of(k, &p.leq).into_iter().filter(|&d| d != 0 || k == 0).collect();
        for hat in order_reversing_involutions(&p) {
            for &ident in &idents {
                jobs.push((p.clone(), hat.clone(), ident));
            }
        }
    }
    let merged: BTreeMap<FrameKey, Found> = jobs
        .par_iter()
        .map(|(p, hat, ident)| algebras_over(p, hat, *ident, &task.profile))
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, found) in b {
                a.entry(key).or_insert(found);
            }
            a
        });
    let mut found: Vec<Found> = merged.into_values().collect();
    found.sort_by(|x, y| (x.algebra.size(), &x.key).cmp(&(y.algebra.size(), &y.key)));
    for (i, f) in found.iter_mut().enumerate() {
        let name = format!("E{}_{}", f.algebra.size(), i + 1);
        f.algebra.set_name(name.clone());
        f.frame.name = name;
    }
    if let Some(dir) = &task.emit {
        emit(dir, &found)?;
    }
    Ok(found)
}

pub fn enumerate(task: &EnumerationTask) -> Result<Vec<Found>, FinderError> {
    enumerate_with_bound(task, DEFAULT_MAX_SIZE)
}

/// Writes each algebra as `<canonical key>.json`.
pub fn emit(dir: &Path, found: &[Found]) -> Result<(), FinderError> {
    let io = |path: &Path, source| FinderError::Io { path: path.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for f in found {
        let path = dir.join(format!("{}.json", f.key.to_hex()));
        let text = serde_json::to_string_pretty(&f.algebra.to_raw()).expect("serialisable");
        fs::write(&path, text).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

/// Count of found algebras per size.
pub fn counts_by_size(found: &[Found]) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for f in found {
        *counts.entry(f.algebra.size()).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(max_size: usize, profile: &str) -> Vec<Found> {
        enumerate(&EnumerationTask { max_size, profile: profile.parse().unwrap(), emit: None }).unwrap()
    }

    #[test]
    fn poset_shapes() {
        // lattices of size ≤ 4: empty, 1-chain, 2-chain, antichain(2), 3-chain
        let posets = join_irreducible_posets(4);
        assert_eq!(posets.len(), 5);
        assert!(posets.iter().all(|p| downsets_of(p.k, &p.leq).len() <= 4));
    }

    #[test]
    fn involutions_of_chain_and_antichain() {
        let chain = PointPoset { k: 2, leq: vec![true, true, false, true] };
        assert_eq!(order_reversing_involutions(&chain), vec![vec![1, 0]]);
        let anti = PointPoset { k: 2, leq: vec![true, false, false, true] };
        assert_eq!(order_reversing_involutions(&anti).len(), 2);
    }

    #[test]
    fn tiny_sizes() {
        let two = run(2, "wkra3+assoc");
        assert_eq!(two.len(), 2);
        assert_eq!(counts_by_size(&run(3, "wkra3+assoc")).get(&3), None);
    }

    #[test]
    fn bound_is_enforced() {
        let task = EnumerationTask { max_size: 9, profile: AxiomProfile::BASE, emit: None };
        assert!(matches!(enumerate(&task), Err(FinderError::TooLarge { requested: 9, bound: 8 })));
    }
}
