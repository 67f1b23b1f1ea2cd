//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Three criteria have documented failures that are reproduced exactly
//! (`EXPECTED_FAIL`); the process exits non-zero if any other criterion
//! fails or a documented failure changes shape.

use std::time::Instant;

use rayon::prelude::*;

use wkra::algebra::FiniteAlgebra;
use wkra::axioms::{
    associativity_violation, check_diagonal, check_frame_conditions_2, check_frame_conditions_3, check_phi2,
    check_top_simple, satisfies_phi2, satisfies_phi3, AxiomProfile,
};
use wkra::finder::{enumerate, EnumerationTask, Found};
use wkra::frame::{algebra_to_frame, find_frame_isomorphism, frame_to_algebra};
use wkra::game::{decide_gamma, solve_pebble_game, GammaOutcome, Winner};
use wkra::models::catalog::{catalog, catalog_entry};
use wkra::models::morphism::{are_isomorphic, direct_product, find_embedding};
use wkra::models::point_algebra::{s4_subalgebra, w61_subalgebra};
use wkra::models::representation::{
    cayley_representation, embed_into_cm_z7, find_finite_representation, verify_representation, RepresentationMap,
};
use wkra::models::sugihara::{sugihara, verify_collapse};
use wkra::models::wk::weakening_relations;
use wkra::models::{build_wk, Poset, Relation, WkBound};

/// Criteria whose failure is analysed in the decisions ledger.
const EXPECTED_FAIL: [usize; 3] = [2, 3, 7];

/// Pinned shape of the criterion 2 failure: one algebra where Φ₃ holds
/// vacuously (every non-⊥ element meets 0) but frame conditions 3.4/3.5 fail.
const C2_PHI3_MISMATCHES: usize = 1;

/// Pinned shape of the criterion 3 failure: (Φ₂, G² ∃, Φ₃, G³ ∃, mismatches).
const C3_COUNTS: (usize, usize, usize, usize, usize) = (11_142, 11_142, 37, 16, 21);

/// Pinned shape of the criterion 7 failure: wk(𝟐) misses on 20 triples.
const C7_WK2_BAD: usize = 20;

struct Line {
    id: usize,
    pass: bool,
    detail: String,
    /// The failure matches the documented analysis.
    as_documented: bool,
}

fn line(id: usize, pass: bool, detail: String) -> Line {
    Line { id, pass, detail, as_documented: false }
}

struct Verdicts {
    name: String,
    phi2: bool,
    phi3: bool,
    fc2: bool,
    fc3: bool,
    g2: bool,
    g3: bool,
    assoc: bool,
}

fn verdicts(f: &Found) -> Verdicts {
    let a = &f.algebra;
    Verdicts {
        name: a.name().to_string(),
        phi2: satisfies_phi2(a),
        phi3: satisfies_phi3(a),
        fc2: check_frame_conditions_2(&f.frame).passed(),
        fc3: check_frame_conditions_3(&f.frame).passed(),
        g2: solve_pebble_game(&f.frame, 2).winner == Winner::Exists,
        g3: solve_pebble_game(&f.frame, 3).winner == Winner::Exists,
        assoc: associativity_violation(a).is_none(),
    }
}

fn entry(name: &str) -> FiniteAlgebra {
    catalog_entry(name).unwrap_or_else(|| panic!("catalog entry {name}"))
}

fn criterion_1() -> Line {
    let task = EnumerationTask { max_size: 6, profile: AxiomProfile::wkra3().with_associativity(), emit: None };
    let found = enumerate(&task).expect("enumeration");
    let cat = catalog();
    let mut matched = vec![0usize; cat.len()];
    let mut unmatched = Vec::new();
    for f in &found {
        let hits: Vec<usize> = (0..cat.len())
            .filter(|&i| {
                cat[i].size() == f.algebra.size()
                    && find_embedding(&f.algebra, &cat[i]).is_some()
                    && find_embedding(&cat[i], &f.algebra).is_some()
            })
            .collect();
        match hits.as_slice() {
            [i] => matched[*i] += 1,
            _ => unmatched.push(f.algebra.name().to_string()),
        }
    }
    let bijection = found.len() == 14 && unmatched.is_empty() && matched.iter().all(|&m| m == 1);
    line(1, bijection, format!("{} classes, {} catalog entries matched once", found.len(), matched.iter().filter(|&&m| m == 1).count()))
}

fn criterion_2(pop: &[Verdicts]) -> Line {
    let m2 = pop.iter().filter(|v| v.phi2 != v.fc2).count();
    let bad3: Vec<&Verdicts> = pop.iter().filter(|v| v.phi3 != v.fc3).collect();
    let m3 = bad3.len();
    let names: Vec<&str> = bad3.iter().map(|v| v.name.as_str()).collect();
    let mut l = line(
        2,
        m2 == 0 && m3 == 0,
        format!("{} algebras, Φ₂/frame mismatches {m2}, Φ₃/frame mismatches {m3} [{}]", pop.len(), names.join(", ")),
    );
    l.as_documented = m2 == 0 && m3 == C2_PHI3_MISMATCHES && bad3.iter().all(|v| v.phi3 && !v.fc3);
    l
}

fn criterion_3(pop: &[Verdicts]) -> Line {
    let count = |p: fn(&Verdicts) -> bool| pop.iter().filter(|v| p(v)).count();
    let phi2 = count(|v| v.phi2);
    let g2 = count(|v| v.g2);
    let m2 = count(|v| v.phi2 != v.g2);
    let phi3 = count(|v| v.phi3);
    let g3 = count(|v| v.g3);
    let bad3: Vec<&Verdicts> = pop.iter().filter(|v| v.phi3 != v.g3).collect();
    let non_assoc = bad3.iter().filter(|v| !v.assoc && v.phi3 && !v.g3).count();
    let mut l = line(
        3,
        m2 == 0 && bad3.is_empty(),
        format!(
            "n=2: Φ₂ {phi2}, G² ∃ {g2}, mismatches {m2}; n=3: Φ₃ {phi3}, G³ ∃ {g3}, mismatches {} ({} non-associative with Φ₃ and ∀ winning; e.g. {})",
            bad3.len(),
            non_assoc,
            bad3.iter().take(3).map(|v| v.name.as_str()).collect::<Vec<_>>().join(", ")
        ),
    );
    l.as_documented = m2 == 0 && (phi2, g2, phi3, g3, bad3.len()) == C3_COUNTS && non_assoc == bad3.len();
    l
}

fn criterion_4(found: &[Found]) -> Line {
    let bad_alg = found
        .par_iter()
        .filter(|f| match frame_to_algebra(&algebra_to_frame(&f.algebra)) {
            Ok(b) => !are_isomorphic(&f.algebra, &b),
            Err(_) => true,
        })
        .count();
    let bad_frame = found
        .par_iter()
        .filter(|f| match frame_to_algebra(&f.frame) {
            Ok(b) => find_frame_isomorphism(&algebra_to_frame(&b), &f.frame).is_none(),
            Err(_) => true,
        })
        .count();
    line(4, bad_alg == 0 && bad_frame == 0, format!("{} structures, algebra failures {bad_alg}, frame failures {bad_frame}", found.len()))
}

fn criterion_5() -> Line {
    let wk = build_wk(&Poset::chain(2), WkBound::default()).expect("wk(2)");
    let expected: Vec<Relation> = [
        vec![],
        vec![(0, 1)],
        vec![(0, 0), (0, 1)],
        vec![(0, 1), (1, 1)],
        vec![(0, 0), (0, 1), (1, 1)],
        vec![(0, 0), (0, 1), (1, 0), (1, 1)],
    ]
    .into_iter()
    .map(|p| Relation::from_pairs(2, p))
    .collect();
    let elements_ok = wk.algebra.size() == 6 && expected.iter().all(|r| wk.element_of(r).is_some());
    let axioms_ok = AxiomProfile::wkra3().with_associativity().admits(&wk.algebra);
    let map = RepresentationMap { poset: wk.poset.clone(), images: wk.relations.clone() };
    let rep_ok = matches!(verify_representation(&wk.algebra, &map), Ok(Ok(())));
    let catalog_ok = are_isomorphic(&wk.algebra, &entry("wk(2)"));
    line(
        5,
        elements_ok && axioms_ok && rep_ok && catalog_ok,
        format!("6 listed elements {elements_ok}, Φ₃+assoc {axioms_ok}, identity representation {rep_ok}, ≅ catalog {catalog_ok}"),
    )
}

fn criterion_6() -> Line {
    let w = entry("W6,2");
    let a = w.index_of("a").expect("generator a");
    let detail;
    let pass = match embed_into_cm_z7(&w, a) {
        Ok(h) => match verify_representation(&w, &cayley_representation(&h)) {
            Ok(Ok(())) => {
                let images: Vec<String> = (0..w.size()).map(|e| format!("{}↦{}", w.element_name(e), h[e])).collect();
                detail = format!("embedding verified over Z₇ ({})", images.join(" "));
                true
            }
            Ok(Err(f)) => {
                detail = format!("representation fails {} [{}]", f.condition, f.witness.render(w.elements()));
                false
            }
            Err(e) => {
                detail = format!("malformed map: {e}");
                false
            }
        },
        Err(e) => {
            detail = format!("no extension: {e:?}");
            false
        }
    };
    line(6, pass, detail)
}

fn discriminates(a: &FiniteAlgebra) -> usize {
    let m = a.size();
    itertools::iproduct!(0..m, 0..m, 0..m)
        .filter(|&(x, y, z)| a.eval_discriminator_term(x, y, z) != if x == y { z } else { x })
        .count()
}

fn criterion_7() -> Line {
    // finitely represented: a representation on at most 4 points, or W6,2 over Z₇
    let mut subjects: Vec<(String, usize)> = Vec::new();
    for a in catalog() {
        let finite = a.name() == "W6,2" || find_finite_representation(&a, 4).is_some();
        if a.name() == "wk(2)" || (check_diagonal(&a) && check_top_simple(&a) && finite) {
            subjects.push((a.name().to_string(), discriminates(&a)));
        }
    }
    let failing: Vec<&(String, usize)> = subjects.iter().filter(|(_, bad)| *bad > 0).collect();

    let mut relations = 0usize;
    let mut eq_fail = 0usize;
    for n in 1..=4 {
        let id = Relation::identity(n);
        for p in Poset::all_up_to_iso(n) {
            for r in weakening_relations(&p, &Relation::full(n)) {
                let neg = r.converse().complement();
                let mid = r.intersection(&neg);
                relations += 1;
                if !id.intersection(&r.compose(&mid)).is_empty() || !id.intersection(&neg.compose(&mid)).is_empty() {
                    eq_fail += 1;
                }
            }
        }
    }
    let names: Vec<String> = subjects.iter().map(|(n, b)| format!("{n}:{b}")).collect();
    let mut l = line(
        7,
        failing.is_empty() && eq_fail == 0,
        format!(
            "d mismatches per algebra [{}]; equations over {relations} weakening relations, failures {eq_fail}{}",
            names.join(" "),
            if failing.is_empty() { String::new() } else { "; wk(2) is not diagonal (1·0 ≠ ⊥)".into() }
        ),
    );
    l.as_documented = eq_fail == 0 && matches!(failing.as_slice(), [(n, b)] if n == "wk(2)" && *b == C7_WK2_BAD);
    l
}

fn criterion_8() -> Line {
    let s2 = are_isomorphic(&sugihara(2), &entry("2"));
    let s4_tables = are_isomorphic(&sugihara(4), &s4_subalgebra());
    let s3 = sugihara(3);
    let report = check_phi2(&s3);
    let witness = report.first_failure().map(|(label, w)| format!("{label} [{}]", w.render(s3.elements())));
    let collapse = verify_collapse(4).is_ok();
    line(
        8,
        s2 && s4_tables && witness.is_some() && collapse,
        format!(
            "S₂≅𝟐 {s2}, S₄≅point subalgebra {s4_tables}, S₃ fails Φ₂ at {}, S₄→S₃ homomorphism {collapse}",
            witness.as_deref().unwrap_or("nothing")
        ),
    )
}

fn criterion_9() -> Line {
    let s4 = entry("S4");
    let prod = direct_product(&s4, &s4);
    let w = entry("W6,3");
    match find_embedding(&w, &prod) {
        Some(h) => {
            let images: Vec<String> = (0..w.size()).map(|e| format!("{}↦{}", w.element_name(e), prod.element_name(h[e]))).collect();
            line(9, true, format!("embedding {}", images.join(" ")))
        }
        None => line(9, false, "no embedding of W6,3 into S4×S4".into()),
    }
}

fn criterion_10() -> Line {
    let oracle = are_isomorphic(&s4_subalgebra(), &entry("S4")) && are_isomorphic(&w61_subalgebra(), &entry("W6,1"));
    let phi3 = ["W6,4", "W6,5", "W6,6"].iter().all(|n| AxiomProfile::wkra3().admits(&entry(n)));
    let mut not_surviving = Vec::new();
    let mut states = 0;
    for a in catalog() {
        let v = decide_gamma(&a, 4);
        states += v.states;
        if v.outcome != GammaOutcome::Exists {
            not_surviving.push(format!("{}: {}", a.name(), v.outcome));
        }
    }
    line(
        10,
        oracle && phi3 && not_surviving.is_empty(),
        format!(
            "point-algebra oracle {oracle}, Φ₃ for W6,4–6 {phi3}, Γ₄ survived by {}/14 ({states} states){}",
            14 - not_surviving.len(),
            if not_surviving.is_empty() { String::new() } else { format!(" [{}]", not_surviving.join(", ")) }
        ),
    )
}

fn main() {
    let start = Instant::now();
    let base = EnumerationTask { max_size: 6, profile: AxiomProfile::BASE, emit: None };
    let found = enumerate(&base).expect("base enumeration");
    let population: Vec<Verdicts> = found.par_iter().map(verdicts).collect();

    let lines = vec![
        criterion_1(),
        criterion_2(&population),
        criterion_3(&population),
        criterion_4(&found),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];

    let mut unexpected = 0;
    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        let note = if !l.pass && l.as_documented && EXPECTED_FAIL.contains(&l.id) { " (documented)" } else { "" };
        println!("criterion {:>2}: {verdict}{note}  {}", l.id, l.detail);
        let ok = l.pass || (l.as_documented && EXPECTED_FAIL.contains(&l.id));
        if !ok {
            unexpected += 1;
        }
    }
    println!(
        "acceptance: {}/{} pass, {} unexpected, {:.1}s",
        lines.iter().filter(|l| l.pass).count(),
        lines.len(),
        unexpected,
        start.elapsed().as_secs_f64()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
