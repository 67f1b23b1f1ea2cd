//! The n-pebble frame game `Gⁿ`, solved as a greatest fixpoint over a
//! basis of small consistent networks.
//!
//! Positions are consistent frame networks with at most `n` nodes. Before a
//! witness move ∀ keeps at most `n - 1` nodes `S` of the current network,
//! picks `x, y ∈ S` and a minimal triple `R^min(λ(x,y), b, c)`; ∃ answers
//! with a node `z` of `S` that already works, or with a consistent network
//! on `S + {z}` that agrees with the current one on `S`. Nodes outside `S`
//! are forgotten. A network survives while every such demand has a
//! surviving answer; networks are deleted in rounds, all at once per round,
//! so the result is independent of iteration order. ∃ wins iff every frame
//! point labels an edge of a surviving network.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::frame::{MinTriple, Point, RelevanceFrame};

use super::network::{frame_consistent, frame_inconsistency, FrameNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Exists,
    Forall,
}

/// A witness demand on a network: keep `subset` (node indices, in order),
/// then realise `R^min(λ(x,y), b, c)` for `x, y ∈ subset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Demand {
    pub subset: Vec<usize>,
    pub x: usize,
    pub y: usize,
    pub b: Point,
    pub c: Point,
}

/// One move of a play. After a witness move the new network lists the
/// kept nodes first, in order, and the witness node last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "lowercase")]
pub enum MoveRecord {
    Init { point: Point, network_after: Option<FrameNetwork> },
    Witness { demand: Demand, network_after: Option<FrameNetwork> },
}

impl MoveRecord {
    pub fn network_after(&self) -> Option<&FrameNetwork> {
        match self {
            MoveRecord::Init { network_after, .. } | MoveRecord::Witness { network_after, .. } => {
                network_after.as_ref()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GameVerdict {
    pub winner: Winner,
    pub pebbles: usize,
    /// For ∃: the surviving networks, one per isomorphism class.
    pub basis: Vec<FrameNetwork>,
    /// For ∀: a play in which ∃ survives as long as possible and still
    /// reaches a demand with no consistent answer.
    pub transcript: Vec<MoveRecord>,
    /// Deletion rounds until the fixpoint.
    pub rounds: usize,
}

impl GameVerdict {
    pub fn exists_wins(&self) -> bool {
        self.winner == Winner::Exists
    }
}

const ALIVE: u32 = u32::MAX;

struct Solver {
    n: usize,
    nets: Vec<FrameNetwork>,
    ids: HashMap<FrameNetwork, usize>,
    stage: Vec<u32>,
    killer: Vec<Option<Demand>>,
    /// `(id of M|S, x, y, b, c)` → networks `M` (reordered with `z` last)
    /// answering that demand.
    answers: HashMap<(usize, usize, usize, Point, Point), Vec<usize>>,
    min_triples: Vec<Vec<MinTriple>>,
}

/// All consistent networks on `1..=max_nodes` nodes, as ordered label
/// matrices.
pub fn consistent_networks(f: &RelevanceFrame, max_nodes: usize) -> Vec<FrameNetwork> {
    let k = f.len();
    let mut out = Vec::new();
    let diag: Vec<Point> = (0..k).filter(|&d| f.ident(d) && f.hat(d) == d && f.r(d, d, d)).collect();
    let mut layer: Vec<FrameNetwork> = diag.iter().map(|&d| FrameNetwork::new(1, vec![d])).collect();
    for size in 1..=max_nodes {
        out.extend(layer.iter().cloned());
        if size == max_nodes {
            break;
        }
        let mut next = Vec::new();
        for net in &layer {
            let m = net.nodes;
            for &d in &diag {
                for row in (0..m).map(|_| 0..k).multi_cartesian_product() {
                    let mut labels = vec![0; (m + 1) * (m + 1)];
                    for x in 0..m {
                        for y in 0..m {
                            labels[x * (m + 1) + y] = net.label(x, y);
                        }
                        labels[x * (m + 1) + m] = row[x];
                        labels[m * (m + 1) + x] = f.hat(row[x]);
                    }
                    labels[m * (m + 1) + m] = d;
                    let cand = FrameNetwork::new(m + 1, labels);
                    if new_node_consistent(&cand, f) {
                        next.push(cand);
                    }
                }
            }
        }
        layer = next;
    }
    out
}

/// Consistency of triangles through the last node, given the rest is
/// consistent.
fn new_node_consistent(n: &FrameNetwork, f: &RelevanceFrame) -> bool {
    let z = n.nodes - 1;
    for x in 0..n.nodes {
        for y in 0..n.nodes {
            if x != z && y != z {
                if !f.r(n.label(x, y), n.label(x, z), n.label(z, y)) {
                    return false;
                }
            } else {
                for w in 0..n.nodes {
                    if !f.r(n.label(x, y), n.label(x, w), n.label(w, y)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn subsets(nodes: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..nodes).combinations(size)
}

impl Solver {
    fn new(f: &RelevanceFrame, n: usize) -> Self {
        let nets = consistent_networks(f, n);
        let ids: HashMap<FrameNetwork, usize> = nets.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut answers: HashMap<_, Vec<usize>> = HashMap::new();
        for m in &nets {
            let size = m.nodes;
            if size < 2 {
                continue;
            }
            for z in 0..size {
                let rest: Vec<usize> = (0..size).filter(|&w| w != z).collect();
                let base = ids[&m.restrict(&rest)];
                let mut order = rest.clone();
                order.push(z);
                let reordered = ids[&m.restrict(&order)];
                for (xi, &x) in rest.iter().enumerate() {
                    for (yi, &y) in rest.iter().enumerate() {
                        answers.entry((base, xi, yi, m.label(x, z), m.label(z, y))).or_default().push(reordered);
                    }
                }
            }
        }
        for list in answers.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let min_triples = (0..f.len()).map(|a| f.r_min(a)).collect();
        let count = nets.len();
        Solver { n, nets, ids, stage: vec![ALIVE; count], killer: vec![None; count], answers, min_triples }
    }

    fn demands(&self, net: &FrameNetwork) -> Vec<Demand> {
        let keep = (self.n - 1).min(net.nodes);
        let mut out = Vec::new();
        for subset in subsets(net.nodes, keep) {
            for (xi, yi) in (0..keep).cartesian_product(0..keep) {
                let (x, y) = (subset[xi], subset[yi]);
                for t in &self.min_triples[net.label(x, y)] {
                    out.push(Demand { subset: subset.clone(), x: xi, y: yi, b: t.b, c: t.c });
                }
            }
        }
        out
    }

    /// Answers to `d` on `net` whose stage is at least `min_stage`;
    /// `None` when a kept node already serves as the witness.
    fn answers_to(&self, net: &FrameNetwork, d: &Demand) -> Option<Vec<usize>> {
        let kept = net.restrict(&d.subset);
        if (0..kept.nodes).any(|w| kept.label(d.x, w) == d.b && kept.label(w, d.y) == d.c) {
            return None;
        }
        let base = self.ids[&kept];
        Some(self.answers.get(&(base, d.x, d.y, d.b, d.c)).cloned().unwrap_or_default())
    }

    fn solve(&mut self) -> usize {
        let mut round = 0u32;
        loop {
            round += 1;
            let mut doomed = Vec::new();
            for id in 0..self.nets.len() {
                if self.stage[id] != ALIVE {
                    continue;
                }
                let net = &self.nets[id];
                for d in self.demands(net) {
                    match self.answers_to(net, &d) {
                        None => continue,
                        Some(ans) if ans.iter().any(|&m| self.stage[m] == ALIVE) => continue,
                        Some(_) => {
                            doomed.push((id, d));
                            break;
                        }
                    }
                }
            }
            if doomed.is_empty() {
                return round as usize - 1;
            }
            for (id, d) in doomed {
                self.stage[id] = round;
                self.killer[id] = Some(d);
            }
        }
    }

    fn best(&self, candidates: impl IntoIterator<Item = usize>) -> Option<usize> {
        candidates.into_iter().max_by_key(|&m| (self.stage[m], std::cmp::Reverse(m)))
    }

    fn transcript(&self, a: Point) -> Vec<MoveRecord> {
        let start = self.best((0..self.nets.len()).filter(|&m| self.nets[m].has_label(a)));
        let mut out = vec![MoveRecord::Init { point: a, network_after: start.map(|m| self.nets[m].clone()) }];
        let mut current = start;
        while let Some(id) = current {
            let d = self.killer[id].clone().expect("deleted network has a killing demand");
            let ans = self.answers_to(&self.nets[id], &d).expect("killing demand needs a new node");
            let next = self.best(ans);
            out.push(MoveRecord::Witness { demand: d, network_after: next.map(|m| self.nets[m].clone()) });
            current = next;
        }
        out
    }
}

/// Solves `Gⁿ(F)` for `n ≥ 2`.
pub fn solve_pebble_game(f: &RelevanceFrame, n: usize) -> GameVerdict {
    assert!(n >= 2, "the pebble game needs at least two pebbles");
    let mut s = Solver::new(f, n);
    let rounds = s.solve();
    let alive: Vec<usize> = (0..s.nets.len()).filter(|&m| s.stage[m] == ALIVE).collect();
    let unreached = (0..f.len()).find(|&a| !alive.iter().any(|&m| s.nets[m].has_label(a)));
    match unreached {
        None => {
            let basis: HashSet<FrameNetwork> = alive.iter().map(|&m| s.nets[m].canonical()).collect();
            let mut basis: Vec<_> = basis.into_iter().collect();
            basis.sort();
            GameVerdict { winner: Winner::Exists, pebbles: n, basis, transcript: Vec::new(), rounds }
        }
        Some(a) => {
            GameVerdict { winner: Winner::Forall, pebbles: n, basis: Vec::new(), transcript: s.transcript(a), rounds }
        }
    }
}

/// Bounded literal play: networks only grow, ∃ must extend the whole
/// current network, and ∀ may ask any minimal witness on any pair. ∃'s
/// initial answer is a consistent network with at most two nodes. Returns
/// the winner when `depth` witness moves follow the initialisation.
pub fn literal_play(f: &RelevanceFrame, depth: usize) -> Winner {
    let starts = consistent_networks(f, 2);
    let min_triples: Vec<Vec<MinTriple>> = (0..f.len()).map(|a| f.r_min(a)).collect();
    let mut memo = HashMap::new();
    let all_covered = (0..f.len()).all(|a| {
        starts.iter().filter(|m| m.has_label(a)).any(|m| literal_survives(f, &min_triples, m, depth, &mut memo))
    });
    if all_covered {
        Winner::Exists
    } else {
        Winner::Forall
    }
}

fn literal_survives(
    f: &RelevanceFrame,
    min_triples: &[Vec<MinTriple>],
    net: &FrameNetwork,
    depth: usize,
    memo: &mut HashMap<(FrameNetwork, usize), bool>,
) -> bool {
    if depth == 0 {
        return true;
    }
    let key = (net.canonical(), depth);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let m = net.nodes;
    let k = f.len();
    let mut result = true;
    'demands: for (x, y) in (0..m).cartesian_product(0..m) {
        for t in &min_triples[net.label(x, y)] {
            if (0..m).any(|w| net.label(x, w) == t.b && net.label(w, y) == t.c) {
                continue;
            }
            let mut answered = false;
            'answers: for d in (0..k).filter(|&d| f.hat(d) == d && f.ident(d)) {
                for row in (0..m).map(|_| 0..k).multi_cartesian_product() {
                    if row[x] != t.b || f.hat(row[y]) != t.c {
                        continue;
                    }
                    let size = m + 1;
                    let mut labels = vec![0; size * size];
                    for u in 0..m {
                        for v in 0..m {
                            labels[u * size + v] = net.label(u, v);
                        }
                        labels[u * size + m] = row[u];
                        labels[m * size + u] = f.hat(row[u]);
                    }
                    labels[m * size + m] = d;
                    let next = FrameNetwork::new(size, labels);
                    if new_node_consistent(&next, f) && literal_survives(f, min_triples, &next, depth - 1, memo) {
                        answered = true;
                        break 'answers;
                    }
                }
            }
            if !answered {
                result = false;
                break 'demands;
            }
        }
    }
    memo.insert(key, result);
    result
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("network {0} is inconsistent")]
    Inconsistent(FrameNetwork),
    #[error("network {0} has more than {1} nodes")]
    TooLarge(FrameNetwork, usize),
    #[error("point {0} labels no network of the basis")]
    Uncovered(Point),
    #[error("demand {demand:?} on {network} has no answer in the basis")]
    Unanswered { network: FrameNetwork, demand: Demand },
    #[error("move {0} is illegal: {1}")]
    IllegalMove(usize, String),
    #[error("transcript ends while ∃ still has a consistent answer")]
    NotFinal,
    #[error("transcript is empty")]
    Empty,
}

/// Checks that `basis` (closed under node permutations here) is a winning
/// position set for ∃ in `Gⁿ(F)`.
pub fn verify_basis(f: &RelevanceFrame, n: usize, basis: &[FrameNetwork]) -> Result<(), CertificateError> {
    let mut all = HashSet::new();
    for net in basis {
        if net.nodes > n {
            return Err(CertificateError::TooLarge(net.clone(), n));
        }
        if !frame_consistent(net, f) {
            return Err(CertificateError::Inconsistent(net.clone()));
        }
        for p in (0..net.nodes).permutations(net.nodes) {
            all.insert(net.restrict(&p));
        }
    }
    if let Some(a) = (0..f.len()).find(|&a| !basis.iter().any(|m| m.has_label(a))) {
        return Err(CertificateError::Uncovered(a));
    }
    for net in &all {
        let keep = (n - 1).min(net.nodes);
        for subset in subsets(net.nodes, keep) {
            let kept = net.restrict(&subset);
            for (x, y) in (0..keep).cartesian_product(0..keep) {
                for t in f.r_min(kept.label(x, y)) {
                    if (0..keep).any(|w| kept.label(x, w) == t.b && kept.label(w, y) == t.c) {
                        continue;
                    }
                    let answered = all.iter().any(|m| {
                        m.nodes == keep + 1
                            && m.restrict(&(0..keep).collect::<Vec<_>>()) == kept
                            && m.label(x, keep) == t.b
                            && m.label(keep, y) == t.c
                    });
                    if !answered {
                        let demand = Demand { subset: subset.clone(), x, y, b: t.b, c: t.c };
                        return Err(CertificateError::Unanswered { network: net.clone(), demand });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Replays a ∀ transcript: every move is legal, every answer of ∃ is a
/// consistent network extending the kept nodes, and the last demand has no
/// consistent answer at all.
pub fn verify_transcript(f: &RelevanceFrame, n: usize, transcript: &[MoveRecord]) -> Result<(), CertificateError> {
    let illegal = |i: usize, why: &str| CertificateError::IllegalMove(i, why.to_string());
    let (first, rest) = transcript.split_first().ok_or(CertificateError::Empty)?;
    let MoveRecord::Init { point, network_after } = first else {
        return Err(illegal(0, "play must start with an initialisation"));
    };
    if *point >= f.len() {
        return Err(illegal(0, "point out of range"));
    }
    let mut current = match network_after {
        None => {
            let any = consistent_networks(f, n).iter().any(|m| m.has_label(*point));
            return if any || !rest.is_empty() { Err(CertificateError::NotFinal) } else { Ok(()) };
        }
        Some(net) => net.clone(),
    };
    if current.nodes > n || !current.has_label(*point) || !frame_consistent(&current, f) {
        return Err(illegal(0, "∃'s initial network is not a legal answer"));
    }
    for (i, mv) in rest.iter().enumerate().map(|(i, m)| (i + 1, m)) {
        let MoveRecord::Witness { demand: d, network_after } = mv else {
            return Err(illegal(i, "only witness moves follow the initialisation"));
        };
        let keep = d.subset.len();
        if keep > n - 1 || !d.subset.iter().all(|&v| v < current.nodes) || d.x >= keep || d.y >= keep {
            return Err(illegal(i, "bad node selection"));
        }
        let kept = current.restrict(&d.subset);
        if !f.is_r_min(kept.label(d.x, d.y), d.b, d.c) {
            return Err(illegal(i, "not a minimal triple"));
        }
        match network_after {
            Some(next) => {
                let prefix: Vec<usize> = (0..keep).collect();
                let ok = next.nodes == keep + 1
                    && next.restrict(&prefix) == kept
                    && next.label(d.x, keep) == d.b
                    && next.label(keep, d.y) == d.c
                    && frame_consistent(next, f);
                if !ok {
                    return Err(illegal(i, "∃'s answer is not a consistent extension"));
                }
                current = next.clone();
            }
            None => {
                if i + 1 != transcript.len() {
                    return Err(illegal(i, "play continues after ∃ is stuck"));
                }
                let served = (0..keep).any(|w| kept.label(d.x, w) == d.b && kept.label(w, d.y) == d.c);
                let k = f.len();
                let extendable = (0..k).any(|z| {
                    (0..keep).map(|_| 0..k).multi_cartesian_product().any(|row| {
                        let m = keep + 1;
                        let mut labels = vec![0; m * m];
                        for x in 0..keep {
                            for y in 0..keep {
                                labels[x * m + y] = kept.label(x, y);
                            }
                            labels[x * m + keep] = row[x];
                            labels[keep * m + x] = f.hat(row[x]);
                        }
                        labels[keep * m + keep] = z;
                        let cand = FrameNetwork::new(m, labels);
                        cand.label(d.x, keep) == d.b
                            && cand.label(keep, d.y) == d.c
                            && frame_inconsistency(&cand, f).is_none()
                    })
                });
                return if served || extendable { Err(CertificateError::NotFinal) } else { Ok(()) };
            }
        }
    }
    Err(CertificateError::NotFinal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{associativity_violation, satisfies_phi2, AxiomProfile};
    use crate::finder::{enumerate, EnumerationTask};
    use crate::frame::algebra_to_frame;
    use crate::models::catalog::{catalog_entry, s3};

    fn population(max_size: usize, profile: AxiomProfile) -> Vec<crate::algebra::FiniteAlgebra> {
        enumerate(&EnumerationTask { max_size, profile, emit: None }).unwrap().into_iter().map(|f| f.algebra).collect()
    }

    #[test]
    fn s4_three_pebbles_exists_with_checked_basis() {
        let f = algebra_to_frame(&catalog_entry("S4").unwrap());
        let v = solve_pebble_game(&f, 3);
        assert_eq!(v.winner, Winner::Exists);
        verify_basis(&f, 3, &v.basis).unwrap();
    }

    #[test]
    fn s3_two_pebbles_forall_with_checked_play() {
        let f = algebra_to_frame(&s3());
        let v = solve_pebble_game(&f, 2);
        assert_eq!(v.winner, Winner::Forall);
        verify_transcript(&f, 2, &v.transcript).unwrap();
    }

    #[test]
    fn square_of_two_three_pebbles_exists() {
        let f = algebra_to_frame(&catalog_entry("2^2").unwrap());
        let v = solve_pebble_game(&f, 3);
        assert_eq!(v.winner, Winner::Exists);
        verify_basis(&f, 3, &v.basis).unwrap();
    }

    #[test]
    fn certificates_replay_on_small_algebras() {
        for a in population(4, AxiomProfile::BASE) {
            let f = algebra_to_frame(&a);
            for n in 2..=3 {
                let v = solve_pebble_game(&f, n);
                match v.winner {
                    Winner::Exists => verify_basis(&f, n, &v.basis).unwrap(),
                    Winner::Forall => verify_transcript(&f, n, &v.transcript).unwrap(),
                }
            }
        }
    }

    #[test]
    fn more_pebbles_never_help_exists() {
        for a in population(4, AxiomProfile::BASE) {
            let f = algebra_to_frame(&a);
            let wins: Vec<bool> = (2..=4).map(|n| solve_pebble_game(&f, n).exists_wins()).collect();
            assert!(wins.windows(2).all(|w| w[0] || !w[1]), "{}", a.name());
        }
    }

    #[test]
    fn two_pebbles_match_phi2_on_small_algebras() {
        for a in population(4, AxiomProfile::BASE) {
            let f = algebra_to_frame(&a);
            assert_eq!(solve_pebble_game(&f, 2).exists_wins(), satisfies_phi2(&a), "{}", a.name());
        }
    }

    #[test]
    fn non_associative_phi3_chain_loses_three_pebbles() {
        // among size ≤ 4 Φ₃ algebras the only losers are non-associative,
        // and ∀ already wins a literal play of one witness move
        let mut losers = 0;
        for a in population(4, AxiomProfile::wkra3()) {
            let f = algebra_to_frame(&a);
            let v = solve_pebble_game(&f, 3);
            if v.winner == Winner::Forall {
                losers += 1;
                assert!(associativity_violation(&a).is_some(), "{}", a.name());
                assert_eq!(literal_play(&f, 1), Winner::Forall);
                verify_transcript(&f, 3, &v.transcript).unwrap();
            }
        }
        assert_eq!(losers, 1);
    }

    #[test]
    fn literal_play_is_harder_than_basis_play() {
        for a in population(4, AxiomProfile::BASE) {
            let f = algebra_to_frame(&a);
            if literal_play(&f, 1) == Winner::Forall {
                assert_eq!(solve_pebble_game(&f, 3).winner, Winner::Forall, "{}", a.name());
            }
        }
    }

    #[test]
    fn catalog_wins_four_pebbles() {
        for a in crate::models::catalog::catalog() {
            let f = algebra_to_frame(&a);
            assert_eq!(solve_pebble_game(&f, 4).winner, Winner::Exists, "{}", a.name());
        }
        assert_eq!(solve_pebble_game(&algebra_to_frame(&s3()), 4).winner, Winner::Forall);
    }
}
