use std::sync::OnceLock;

use proptest::prelude::*;

use wkra::algebra::{FiniteAlgebra, RawAlgebra};
use wkra::axioms::{associativity_violation, satisfies_phi2, satisfies_phi3, AxiomProfile};
use wkra::finder::{canonical_form, enumerate, EnumerationTask, Found};
use wkra::frame::{algebra_to_frame, canonical_frame_key, find_frame_isomorphism, frame_to_algebra, RawFrame, RelevanceFrame};
use wkra::game::sigma::Rel;
use wkra::game::{decide_gamma, parse_formula, solve_pebble_game, Formula, GammaOutcome, Term, Winner};
use wkra::models::catalog::catalog;
use wkra::models::morphism::are_isomorphic;

fn population() -> &'static [Found] {
    static POP: OnceLock<Vec<Found>> = OnceLock::new();
    POP.get_or_init(|| enumerate(&EnumerationTask { max_size: 5, profile: AxiomProfile::BASE, emit: None }).unwrap())
}

fn member() -> impl Strategy<Value = &'static Found> {
    (0..population().len()).prop_map(|i| &population()[i])
}

/// Applies `perm` (old index → new index) to every table.
fn relabel_algebra(a: &FiniteAlgebra, perm: &[usize]) -> FiniteAlgebra {
    let raw = a.to_raw();
    let m = raw.elements.len();
    let mut inv = vec![0; m];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    let comp = (0..m).map(|i| (0..m).map(|j| perm[raw.comp[inv[i]][inv[j]]]).collect()).collect();
    FiniteAlgebra::new(RawAlgebra {
        name: raw.name.clone(),
        elements: inv.iter().map(|&o| raw.elements[o].clone()).collect(),
        leq: raw.leq.iter().map(|&[x, y]| [perm[x], perm[y]]).collect(),
        comp,
        neg: inv.iter().map(|&o| perm[raw.neg[o]]).collect(),
        one: perm[raw.one],
        bot: perm[raw.bot],
        top: perm[raw.top],
    })
    .unwrap()
}

fn relabel_frame(f: &RelevanceFrame, perm: &[usize]) -> RelevanceFrame {
    let raw = f.to_raw();
    let k = raw.points.len();
    let mut inv = vec![0; k];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    RelevanceFrame::new(&RawFrame {
        name: raw.name.clone(),
        points: inv.iter().map(|&o| raw.points[o].clone()).collect(),
        leq: raw.leq.iter().map(|&[x, y]| [perm[x], perm[y]]).collect(),
        hat: inv.iter().map(|&o| perm[raw.hat[o]]).collect(),
        ident: raw.ident.iter().map(|&p| perm[p]).collect(),
        r: raw.r.iter().map(|&[a, b, c]| [perm[a], perm[b], perm[c]]).collect(),
        r_is_generators: raw.r_is_generators,
    })
    .unwrap()
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..4u8).prop_map(|i| Term::Var(format!("v{i}"))),
        Just(Term::Top),
        Just(Term::Bot),
        Just(Term::One),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::Neg(Box::new(t))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Comp(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Join(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Term::Meet(Box::new(a), Box::new(b))),
        ]
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let rel = prop_oneof![Just(Rel::Eq), Just(Rel::Ne), Just(Rel::Le), Just(Rel::Nle)];
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (rel, term(), term()).prop_map(|(r, a, b)| Formula::Atom(r, a, b)),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (prop::collection::btree_set(0..4u8, 1..3), inner).prop_map(|(vs, body)| {
                Formula::Forall(vs.into_iter().map(|i| format!("v{i}")).collect(), Box::new(body))
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabelling_an_algebra_preserves_everything(
        (f, perm) in member().prop_flat_map(|f| (Just(f), permutation(f.algebra.size())))
    ) {
        let a = &f.algebra;
        let b = relabel_algebra(a, &perm);
        prop_assert_eq!(canonical_form(a), canonical_form(&b));
        prop_assert!(are_isomorphic(a, &b));
        prop_assert_eq!(satisfies_phi2(a), satisfies_phi2(&b));
        prop_assert_eq!(satisfies_phi3(a), satisfies_phi3(&b));
        prop_assert_eq!(associativity_violation(a).is_none(), associativity_violation(&b).is_none());
    }

    #[test]
    fn canonical_frame_key_ignores_point_order(
        (f, perm) in member().prop_flat_map(|f| (Just(f), permutation(f.frame.len())))
    ) {
        let g = relabel_frame(&f.frame, &perm);
        prop_assert_eq!(canonical_frame_key(&f.frame), canonical_frame_key(&g));
        prop_assert!(find_frame_isomorphism(&f.frame, &g).is_some());
        prop_assert_eq!(
            solve_pebble_game(&f.frame, 2).winner,
            solve_pebble_game(&g, 2).winner
        );
    }

    #[test]
    fn duality_round_trips(f in member()) {
        let back = frame_to_algebra(&algebra_to_frame(&f.algebra)).unwrap();
        prop_assert!(are_isomorphic(&f.algebra, &back));
        let again = algebra_to_frame(&frame_to_algebra(&f.frame).unwrap());
        prop_assert!(find_frame_isomorphism(&f.frame, &again).is_some());
    }

    #[test]
    fn pebble_game_is_monotone_in_pebbles(f in member()) {
        let g3 = solve_pebble_game(&f.frame, 3).winner;
        let g2 = solve_pebble_game(&f.frame, 2).winner;
        prop_assert!(g3 == Winner::Forall || g2 == Winner::Exists);
    }

    #[test]
    fn printed_formulas_parse_back(f in formula()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gamma_survival_is_antitone_in_rounds(i in 0usize..14, r in 0usize..3) {
        let a = &catalog()[i];
        let longer = decide_gamma(a, r + 1).outcome;
        if longer == GammaOutcome::Exists {
            prop_assert_eq!(decide_gamma(a, r).outcome, GammaOutcome::Exists);
        }
    }

    #[test]
    fn gamma_survival_is_antitone_on_small_algebras(f in member(), r in 0usize..2) {
        let longer = decide_gamma(&f.algebra, r + 1).outcome;
        let shorter = decide_gamma(&f.algebra, r).outcome;
        prop_assert!(longer != GammaOutcome::Exists || shorter == GammaOutcome::Exists);
        prop_assert!(shorter != GammaOutcome::Forall || longer == GammaOutcome::Forall);
    }
}
