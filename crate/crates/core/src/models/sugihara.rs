//! Sugihara chains `Sₙ` and the collapse `Sₙ → Sₙ₋₁` for even `n`.

use crate::algebra::{Elem, FiniteAlgebra};

use super::morphism::check_homomorphism;

/// Subscripts of `Sₙ` in increasing order: `-k..=k` for `n = 2k+1`,
/// the same without `0` for `n = 2k`.
pub fn subscripts(n: usize) -> Vec<i64> {
    let k = (n / 2) as i64;
    (-k..=k).filter(|&i| n % 2 == 1 || i != 0).collect()
}

/// `Sₙ` with `∼aᵢ = a₋ᵢ`, unit `a₀` (odd) or `a₁` (even), and the product
/// that returns the factor of larger absolute subscript, the meet on ties.
pub fn sugihara(n: usize) -> FiniteAlgebra {
    assert!(n >= 1, "Sugihara chains have at least one element");
    let subs = subscripts(n);
    let pos = |i: i64| subs.iter().position(|&x| x == i).expect("subscript in range");
    let product = |i: i64, j: i64| -> i64 {
        match i.abs().cmp(&j.abs()) {
            std::cmp::Ordering::Greater => i,
            std::cmp::Ordering::Less => j,
            std::cmp::Ordering::Equal => i.min(j),
        }
    };
    let leq = (0..n * n).map(|ij| ij / n <= ij % n).collect();
    let join = (0..n * n).map(|ij| (ij / n).max(ij % n)).collect();
    let meet = (0..n * n).map(|ij| (ij / n).min(ij % n)).collect();
    let comp = (0..n * n).map(|ij| pos(product(subs[ij / n], subs[ij % n]))).collect();
    let neg = subs.iter().map(|&i| pos(-i)).collect();
    let one = pos(if n % 2 == 1 { 0 } else { 1 });
    let names = subs.iter().map(|i| format!("a{i}")).collect();
    FiniteAlgebra::from_trusted_tables(format!("S{n}"), names, leq, join, meet, comp, neg, 0, n - 1, one)
        .expect("Sugihara chain")
}

/// The map `Sₙ → Sₙ₋₁` (`n` even, `n ≥ 4`) identifying `a₁` and `a₋₁`:
/// `aᵢ ↦ a_{sign(i)(|i|-1)}`.
pub fn hom_even_to_odd(n: usize) -> Result<Vec<Elem>, String> {
    if n % 2 == 1 || n < 2 {
        return Err(format!("S{n} is not an even chain"));
    }
    let target = subscripts(n - 1);
    Ok(subscripts(n)
        .into_iter()
        .map(|i| {
            let j = i.signum() * (i.abs() - 1);
            target.iter().position(|&x| x == j).expect("image subscript")
        })
        .collect())
}

/// Verifies [`hom_even_to_odd`] is a surjective homomorphism.
pub fn verify_collapse(n: usize) -> Result<Vec<Elem>, String> {
    let h = hom_even_to_odd(n)?;
    let (src, dst) = (sugihara(n), sugihara(n - 1));
    check_homomorphism(&src, &dst, &h).map_err(|v| format!("not a homomorphism: {}", v.operation))?;
    if (0..dst.size()).any(|t| !h.contains(&t)) {
        return Err("not surjective".into());
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::validate_algebra;
    use crate::axioms::{check_associativity, check_phi2, check_phi3};

    #[test]
    fn small_chains_validate() {
        for n in 1..=7 {
            let s = sugihara(n);
            assert!(validate_algebra(&s.to_raw()).unwrap().passed(), "S{n}");
            assert!(check_associativity(&s).passed(), "S{n}");
        }
    }

    #[test]
    fn even_chains_pass_phi3_odd_fail_phi2() {
        for n in [2, 4, 6] {
            assert!(check_phi3(&sugihara(n)).passed(), "S{n}");
        }
        for n in [3, 5, 7] {
            assert!(!check_phi2(&sugihara(n)).passed(), "S{n}");
        }
    }

    #[test]
    fn s4_products() {
        let s = sugihara(4);
        let idx = |name: &str| s.index_of(name).unwrap();
        assert_eq!(s.comp(idx("a-1"), idx("a-1")), idx("a-1"));
        assert_eq!(s.one(), idx("a1"));
        assert_eq!(s.zero(), idx("a-1"));
    }

    #[test]
    fn odd_chain_has_self_negated_middle() {
        let s = sugihara(3);
        let a0 = s.index_of("a0").unwrap();
        assert_eq!(s.neg(a0), a0);
    }

    #[test]
    fn collapse_is_a_surjective_homomorphism() {
        for n in [2, 4, 6] {
            assert!(verify_collapse(n).is_ok(), "S{n}");
        }
        assert!(hom_even_to_odd(5).is_err());
    }
}
