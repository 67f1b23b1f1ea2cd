//! The 14 algebras with at most six elements satisfying Φ₃ with associative
//! composition, and the procedure that reconstructs them from their Hasse
//! diagrams.
//!
//! Each diagram fixes the lattice, `∼` (from the labels), the unit, which
//! elements are idempotent, and a few products such as `0;0`. The remaining
//! composition entries are filled in by searching frames over the fixed
//! `(P, ^, I)`; the completion must be unique up to isomorphism. The
//! shipped algebra files are the output of this procedure.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteAlgebra, RawAlgebra};
use crate::axioms::AxiomProfile;
use crate::finder::{composition_tables, frame_from_table, PointPoset};
use crate::frame::{canonical_frame_key, downsets_of, frame_to_algebra, Point};

/// One diagram. Elements not listed as idempotent satisfy `x;x ≠ x`
/// (`⊥` and `⊤` are always idempotent and need not be listed).
#[derive(Clone, Copy, Debug)]
pub struct Diagram {
    pub name: &'static str,
    pub file: &'static str,
    pub elements: &'static [&'static str],
    /// `(lower, upper)` covering pairs.
    pub covers: &'static [(&'static str, &'static str)],
    /// `∼` pairs; each listed once.
    pub neg: &'static [(&'static str, &'static str)],
    pub one: &'static str,
    pub idempotent: &'static [&'static str],
    /// `(x, y, x;y)`.
    pub products: &'static [(&'static str, &'static str, &'static str)],
}

const FOUR: &[&str] = &["bot", "1", "0", "top"];
const SIX: &[&str] = &["bot", "1", "a", "~a", "0", "top"];
const SQUARE_COVERS: &[(&str, &str)] = &[("bot", "1"), ("bot", "0"), ("1", "top"), ("0", "top")];
const FOUR_NEG: &[(&str, &str)] = &[("bot", "top"), ("1", "0")];
const SIX_NEG: &[(&str, &str)] = &[("bot", "top"), ("1", "0"), ("a", "~a")];
/// `⊥ < 1, a < ∼a` and `a < 0`; `∼a, 0 < ⊤`.
const W61_COVERS: &[(&str, &str)] =
    &[("bot", "1"), ("bot", "a"), ("1", "~a"), ("a", "~a"), ("a", "0"), ("~a", "top"), ("0", "top")];
/// `⊥ < 0 < a, ∼a < 1 < ⊤`.
const DIAMOND_COVERS: &[(&str, &str)] =
    &[("bot", "0"), ("0", "a"), ("0", "~a"), ("a", "1"), ("~a", "1"), ("1", "top")];
/// `⊥ < a < 1, 0 < ∼a < ⊤`.
const W64_COVERS: &[(&str, &str)] =
    &[("bot", "a"), ("a", "1"), ("a", "0"), ("1", "~a"), ("0", "~a"), ("~a", "top")];

pub const DIAGRAMS: [Diagram; 14] = [
    Diagram {
        name: "1",
        file: "1.json",
        elements: &["1"],
        covers: &[],
        neg: &[("1", "1")],
        one: "1",
        idempotent: &[],
        products: &[],
    },
    Diagram {
        name: "2",
        file: "2.json",
        elements: &["0", "1"],
        covers: &[("0", "1")],
        neg: &[("0", "1")],
        one: "1",
        idempotent: &[],
        products: &[],
    },
    Diagram {
        name: "2^2",
        file: "2x2.json",
        elements: &["0", "a", "~a", "1"],
        covers: &[("0", "a"), ("0", "~a"), ("a", "1"), ("~a", "1")],
        neg: &[("0", "1"), ("a", "~a")],
        one: "1",
        idempotent: &["a", "~a"],
        products: &[],
    },
    Diagram {
        name: "A2",
        file: "A2.json",
        elements: FOUR,
        covers: SQUARE_COVERS,
        neg: FOUR_NEG,
        one: "1",
        idempotent: &["1"],
        products: &[("0", "0", "1")],
    },
    Diagram {
        name: "A3",
        file: "A3.json",
        elements: FOUR,
        covers: SQUARE_COVERS,
        neg: FOUR_NEG,
        one: "1",
        idempotent: &["1"],
        products: &[("0", "0", "top")],
    },
    Diagram {
        name: "S4",
        file: "S4.json",
        elements: &["bot", "0", "1", "top"],
        covers: &[("bot", "0"), ("0", "1"), ("1", "top")],
        neg: FOUR_NEG,
        one: "1",
        idempotent: &["0", "1"],
        products: &[],
    },
    Diagram {
        name: "W6,1",
        file: "W6_1.json",
        elements: SIX,
        covers: W61_COVERS,
        neg: SIX_NEG,
        one: "1",
        idempotent: &["1", "a", "~a"],
        products: &[("0", "0", "top")],
    },
    Diagram {
        name: "W6,2",
        file: "W6_2.json",
        elements: SIX,
        covers: W61_COVERS,
        neg: SIX_NEG,
        one: "1",
        idempotent: &["1"],
        products: &[("0", "0", "top")],
    },
    Diagram {
        name: "W6,3",
        file: "W6_3.json",
        elements: SIX,
        covers: DIAMOND_COVERS,
        neg: SIX_NEG,
        one: "1",
        idempotent: &["1", "a", "~a", "0"],
        products: &[],
    },
    Diagram {
        name: "W6,4",
        file: "W6_4.json",
        elements: SIX,
        covers: W64_COVERS,
        neg: SIX_NEG,
        one: "1",
        idempotent: &["1", "a", "~a"],
        products: &[("0", "a", "a"), ("0", "0", "1")],
    },
    Diagram {
        name: "W6,5",
        file: "W6_5.json",
        elements: SIX,
        covers: W64_COVERS,
        neg: SIX_NEG,
        one: "1",
        idempotent: &["1", "a", "~a"],
        products: &[("0", "a", "a"), ("0", "0", "~a")],
    },
    Diagram {
        name: "W6,6",
        file: "W6_6.json",
        elements: SIX,
        covers: W64_COVERS,
        neg: SIX_NEG,
        one: "1",
        idempotent: &["1", "a"],
        products: &[("0", "a", "0"), ("0", "0", "top")],
    },
    Diagram {
        name: "wk(2)",
        file: "wk2.json",
        elements: SIX,
        covers: DIAMOND_COVERS,
        neg: SIX_NEG,
        one: "1",
        idempotent: &["1", "a", "~a"],
        products: &[("0", "0", "bot")],
    },
    Diagram {
        name: "S6",
        file: "S6.json",
        elements: &["bot", "a", "0", "1", "~a", "top"],
        covers: &[("bot", "a"), ("a", "0"), ("0", "1"), ("1", "~a"), ("~a", "top")],
        neg: SIX_NEG,
        one: "1",
        idempotent: &["a", "0", "1", "~a"],
        products: &[],
    },
];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{diagram}: unknown element `{element}`")]
    UnknownElement { diagram: &'static str, element: &'static str },
    #[error("{diagram}: covers do not form a bounded distributive lattice")]
    NotDistributive { diagram: &'static str },
    #[error("{diagram}: the ∼ labels are not induced by an order-reversing involution of the join-irreducibles")]
    BadNegation { diagram: &'static str },
    #[error("{diagram}: {count} non-isomorphic completions, expected exactly one")]
    NotUnique { diagram: &'static str, count: usize },
    #[error("{diagram}: {source}")]
    Algebra { diagram: &'static str, source: AlgebraError },
    #[error("shipped file {file} is not a valid algebra: {reason}")]
    BadFile { file: &'static str, reason: String },
}

/// Lattice data of a diagram with elements mapped to downsets of their
/// join-irreducibles.
struct Lattice {
    m: usize,
    leq: Vec<bool>,
    poset: PointPoset,
    down: Vec<u64>,
    neg: Vec<Elem>,
    hat: Vec<Point>,
    ident: u64,
    bot: Elem,
    top: Elem,
    one: Elem,
}

fn lattice_of(d: &Diagram) -> Result<Lattice, CatalogError> {
    let diagram = d.name;
    let index = |e: &'static str| {
        d.elements.iter().position(|&x| x == e).ok_or(CatalogError::UnknownElement { diagram, element: e })
    };
    let m = d.elements.len();
    let mut leq = vec![false; m * m];
    for i in 0..m {
        leq[i * m + i] = true;
    }
    for &(lo, hi) in d.covers {
        leq[index(lo)? * m + index(hi)?] = true;
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if leq[i * m + k] && leq[k * m + j] {
                    leq[i * m + j] = true;
                }
            }
        }
    }
    let not_distributive = CatalogError::NotDistributive { diagram };
    let bot = (0..m).find(|&b| (0..m).all(|x| leq[b * m + x])).ok_or(CatalogError::NotDistributive { diagram })?;
    let top = (0..m).find(|&t| (0..m).all(|x| leq[x * m + t])).ok_or(CatalogError::NotDistributive { diagram })?;
    // join-irreducible: exactly one lower cover; listed bottom-up
    let lower_covers = |x: Elem| {
        (0..m)
            .filter(|&y| y != x && leq[y * m + x])
            .filter(|&y| !(0..m).any(|z| z != x && z != y && leq[y * m + z] && leq[z * m + x]))
            .count()
    };
    let mut jis: Vec<Elem> = (0..m).filter(|&x| lower_covers(x) == 1).collect();
    jis.sort_by_key(|&x| ((0..m).filter(|&y| leq[y * m + x]).count(), x));
    let k = jis.len();
    let poset = PointPoset { k, leq: (0..k * k).map(|ab| leq[jis[ab / k] * m + jis[ab % k]]).collect() };
    let down: Vec<u64> =
        (0..m).map(|x| (0..k).filter(|&a| leq[jis[a] * m + x]).fold(0u64, |acc, a| acc | 1 << a)).collect();
    let mut sorted_down = down.clone();
    sorted_down.sort_unstable();
    let mut all = downsets_of(k, &poset.leq);
    all.sort_unstable();
    if sorted_down != all || (0..m * m).any(|ij| leq[ij] != (down[ij / m] & !down[ij % m] == 0)) {
        return Err(not_distributive);
    }
    let mut neg = vec![usize::MAX; m];
    for &(x, y) in d.neg {
        let (x, y) = (index(x)?, index(y)?);
        neg[x] = y;
        neg[y] = x;
    }
    if neg.contains(&usize::MAX) {
        return Err(CatalogError::BadNegation { diagram });
    }
    // ∼X = {a | â ∉ X}, so â ≤ b iff a ∉ ∼↓b
    let hat: Vec<Point> = (0..k)
        .map(|a| {
            let above: Vec<Point> = (0..k).filter(|&b| down[neg[jis[b]]] >> a & 1 == 0).collect();
            above.iter().copied().find(|&b| above.iter().all(|&c| poset.leq[b * k + c])).unwrap_or(usize::MAX)
        })
        .collect();
    let induced =
        |x: Elem| (0..k).filter(|&a| hat[a] == usize::MAX || down[x] >> hat[a] & 1 == 0).fold(0u64, |acc, a| acc | 1 << a);
    if hat.contains(&usize::MAX) || (0..m).any(|x| down[neg[x]] != induced(x)) {
        return Err(CatalogError::BadNegation { diagram });
    }
    let one = index(d.one)?;
    Ok(Lattice { m, leq, poset, ident: down[one], down, neg, hat, bot, top, one })
}

/// Fills in the composition table of a diagram. Fails unless exactly one
/// completion exists up to isomorphism.
pub fn complete(d: &Diagram) -> Result<FiniteAlgebra, CatalogError> {
    let diagram = d.name;
    let lat = lattice_of(d)?;
    let index = |e: &'static str| {
        d.elements.iter().position(|&x| x == e).ok_or(CatalogError::UnknownElement { diagram, element: e })
    };
    let idempotent: Vec<Elem> = d.idempotent.iter().map(|&e| index(e)).collect::<Result<_, _>>()?;
    let products: Vec<(Elem, Elem, Elem)> =
        d.products.iter().map(|&(x, y, z)| Ok((index(x)?, index(y)?, index(z)?))).collect::<Result<_, CatalogError>>()?;
    let m = lat.m;
    let k = lat.poset.k;
    let elem_of: BTreeMap<u64, Elem> = lat.down.iter().enumerate().map(|(x, &s)| (s, x)).collect();
    let profile = AxiomProfile::wkra3().with_associativity();
    let mut completions = BTreeMap::new();
    for table in composition_tables(&lat.poset, lat.ident, true) {
        let image = |s: u64, t: u64| {
            let mut out = 0u64;
            for b in (0..k).filter(|&b| s >> b & 1 == 1) {
                for c in (0..k).filter(|&c| t >> c & 1 == 1) {
                    out |= table[b * k + c];
                }
            }
            out
        };
        let comp: Vec<Elem> = (0..m * m).map(|xy| elem_of[&image(lat.down[xy / m], lat.down[xy % m])]).collect();
        let markers_hold = (0..m)
            .filter(|&x| x != lat.bot && x != lat.top)
            .all(|x| (comp[x * m + x] == x) == idempotent.contains(&x))
            && products.iter().all(|&(x, y, z)| comp[x * m + y] == z);
        if !markers_hold {
            continue;
        }
        let frame = frame_from_table(&lat.poset, &lat.hat, lat.ident, &table);
        let from_frame = frame_to_algebra(&frame).expect("frame tables are closed");
        if profile.admits(&from_frame) {
            completions.entry(canonical_frame_key(&frame)).or_insert(comp);
        }
    }
    if completions.len() != 1 {
        return Err(CatalogError::NotUnique { diagram, count: completions.len() });
    }
    let comp = completions.into_values().next().expect("one completion");
    let raw = RawAlgebra {
        name: d.name.to_string(),
        elements: d.elements.iter().map(|s| s.to_string()).collect(),
        leq: (0..m * m).filter(|&ij| ij / m != ij % m && lat.leq[ij]).map(|ij| [ij / m, ij % m]).collect(),
        comp: comp.chunks(m).map(|row| row.to_vec()).collect(),
        neg: lat.neg,
        one: lat.one,
        bot: lat.bot,
        top: lat.top,
    };
    FiniteAlgebra::new(raw).map_err(|source| CatalogError::Algebra { diagram, source })
}

const SHIPPED: [(&str, &str); 14] = [
    ("1.json", include_str!("../../../../catalog/1.json")),
    ("2.json", include_str!("../../../../catalog/2.json")),
    ("2x2.json", include_str!("../../../../catalog/2x2.json")),
    ("A2.json", include_str!("../../../../catalog/A2.json")),
    ("A3.json", include_str!("../../../../catalog/A3.json")),
    ("S4.json", include_str!("../../../../catalog/S4.json")),
    ("W6_1.json", include_str!("../../../../catalog/W6_1.json")),
    ("W6_2.json", include_str!("../../../../catalog/W6_2.json")),
    ("W6_3.json", include_str!("../../../../catalog/W6_3.json")),
    ("W6_4.json", include_str!("../../../../catalog/W6_4.json")),
    ("W6_5.json", include_str!("../../../../catalog/W6_5.json")),
    ("W6_6.json", include_str!("../../../../catalog/W6_6.json")),
    ("wk2.json", include_str!("../../../../catalog/wk2.json")),
    ("S6.json", include_str!("../../../../catalog/S6.json")),
];

/// The odd Sugihara chain `S₃`, shipped alongside the catalog as a
/// counterexample file.
pub const S3_FILE: (&str, &str) = ("S3.json", include_str!("../../../../catalog/S3.json"));

fn parse_shipped(file: &'static str, text: &str) -> Result<(RawAlgebra, FiniteAlgebra), CatalogError> {
    let bad = |reason: String| CatalogError::BadFile { file, reason };
    let raw: RawAlgebra = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let alg = FiniteAlgebra::new(raw.clone()).map_err(|e| bad(e.to_string()))?;
    Ok((raw, alg))
}

/// The shipped raw files, in diagram order.
pub fn catalog_files() -> Vec<(&'static str, RawAlgebra)> {
    SHIPPED
        .iter()
        .map(|&(file, text)| (file, parse_shipped(file, text).expect("shipped catalog file").0))
        .collect()
}

/// The 14 catalog algebras in diagram order.
pub fn catalog() -> Vec<FiniteAlgebra> {
    SHIPPED.iter().map(|&(file, text)| parse_shipped(file, text).expect("shipped catalog file").1).collect()
}

pub fn catalog_entry(name: &str) -> Option<FiniteAlgebra> {
    catalog().into_iter().find(|a| a.name() == name)
}

pub fn s3() -> FiniteAlgebra {
    parse_shipped(S3_FILE.0, S3_FILE.1).expect("shipped S3 file").1
}

/// Re-runs the completion for every diagram and compares with the shipped
/// file; returns the names of diagrams whose completion differs.
pub fn verify_shipped() -> Result<Vec<&'static str>, CatalogError> {
    let mut differing = Vec::new();
    for (d, (file, text)) in DIAGRAMS.iter().zip(SHIPPED) {
        let (raw, _) = parse_shipped(file, text)?;
        if complete(d)?.to_raw() != raw {
            differing.push(d.name);
        }
    }
    Ok(differing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::validate_algebra;
    use crate::axioms::{check_associativity, check_phi2, check_phi3};
    use crate::models::morphism::{are_isomorphic, find_embedding};
    use crate::models::poset::Poset;
    use crate::models::sugihara::sugihara;
    use crate::models::wk::{build_wk, WkBound};

    #[test]
    fn completion_reproduces_shipped_files() {
        assert_eq!(verify_shipped().unwrap(), Vec::<&str>::new());
    }

    #[test]
    fn fourteen_valid_entries() {
        let cat = catalog();
        assert_eq!(cat.len(), 14);
        for a in &cat {
            assert!(validate_algebra(&a.to_raw()).unwrap().passed(), "{}", a.name());
            assert!(check_phi3(a).passed(), "{}", a.name());
            assert!(check_associativity(a).passed(), "{}", a.name());
        }
        for (i, a) in cat.iter().enumerate() {
            for b in &cat[i + 1..] {
                assert!(!are_isomorphic(a, b), "{} ≅ {}", a.name(), b.name());
            }
        }
    }

    #[test]
    fn named_entries_match_constructions() {
        let wk2 = build_wk(&Poset::chain(2), WkBound::default()).unwrap();
        assert!(are_isomorphic(&catalog_entry("wk(2)").unwrap(), &wk2.algebra));
        assert!(are_isomorphic(&catalog_entry("S4").unwrap(), &sugihara(4)));
        assert!(are_isomorphic(&catalog_entry("S6").unwrap(), &sugihara(6)));
        assert!(are_isomorphic(&catalog_entry("2").unwrap(), &sugihara(2)));
    }

    #[test]
    fn no_self_negated_elements() {
        for a in catalog().iter().filter(|a| a.size() > 1) {
            assert!((0..a.size()).all(|x| a.neg(x) != x), "{}", a.name());
        }
    }

    #[test]
    fn s3_is_outside() {
        let s3 = s3();
        assert!(!check_phi2(&s3).passed());
        for a in catalog() {
            assert!(find_embedding(&s3, &a).is_none(), "{}", a.name());
        }
    }

    #[test]
    fn ambiguous_diagram_is_rejected() {
        // W6,4 and W6,5 differ only in 0;0
        let loose = Diagram { products: &[("0", "a", "a")], ..DIAGRAMS[9] };
        assert!(matches!(complete(&loose), Err(CatalogError::NotUnique { .. })));
    }
}
