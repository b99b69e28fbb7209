//! Buchberger's algorithm over the rationals, with normal forms, block-order
//! elimination, and dimension counting via independent sets.

use crate::error::{Error, Result};
use crate::series::Monomial;

use super::poly::{QPoly, TermOrder};

fn lcm(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial(a.0.iter().zip(&b.0).map(|(x, y)| *x.max(y)).collect())
}

/// Fully reduced normal form of `f` against `basis`.
pub fn normal_form(f: &QPoly, basis: &[QPoly], order: TermOrder) -> QPoly {
    let nvars = f.nvars();
    let mut rem = QPoly::zero(nvars);
    let mut cur = f.clone();
    'outer: while let Some((lm, lc)) = cur.leading(order).map(|(m, c)| (m.clone(), c.clone())) {
        for g in basis {
            if let Some((gm, gc)) = g.leading(order) {
                if let Some(q) = lm.checked_div(gm) {
                    let factor = &lc / gc;
                    cur = cur.sub(&g.mul_term(&q, &factor));
                    continue 'outer;
                }
            }
        }
        rem.add_term(lm.clone(), lc.clone());
        cur = cur.sub(&QPoly::monomial(nvars, lm.0, lc));
    }
    rem
}

fn s_poly(f: &QPoly, g: &QPoly, order: TermOrder) -> QPoly {
    let (fm, fc) = f.leading(order).unwrap();
    let (gm, gc) = g.leading(order).unwrap();
    let l = lcm(fm, gm);
    let qf = l.checked_div(fm).unwrap();
    let qg = l.checked_div(gm).unwrap();
    f.mul_term(&qf, &fc.recip()).sub(&g.mul_term(&qg, &gc.recip()))
}

/// Reduced Groebner basis: monic, interreduced, sorted by leading monomial.
pub fn groebner_basis(gens: &[QPoly], order: TermOrder) -> Vec<QPoly> {
    let mut basis: Vec<QPoly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.monic(order))
        .collect();
    if basis.is_empty() {
        return basis;
    }
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (0..i).map(move |j| (j, i)))
        .collect();
    while let Some((i, j)) = pairs.pop() {
        let (fm, _) = basis[i].leading(order).unwrap();
        let (gm, _) = basis[j].leading(order).unwrap();
        // Coprime leading monomials reduce to zero (first Buchberger criterion).
        if lcm(fm, gm) == fm.mul(gm) {
            continue;
        }
        let s = s_poly(&basis[i], &basis[j], order);
        let r = normal_form(&s, &basis, order);
        if !r.is_zero() {
            let r = r.monic(order);
            for k in 0..basis.len() {
                pairs.push((k, basis.len()));
            }
            basis.push(r);
        }
    }
    interreduce(basis, order)
}

fn interreduce(basis: Vec<QPoly>, order: TermOrder) -> Vec<QPoly> {
    // Minimal basis first: drop any element whose leading monomial is divided
    // by another's (first occurrence wins on ties). The survivors then have
    // pairwise incomparable leading terms, so tail reduction cannot zero them.
    let mut minimal: Vec<QPoly> = Vec::new();
    'cand: for g in &basis {
        let gm = g.leading(order).unwrap().0;
        for kept in &minimal {
            if gm.checked_div(kept.leading(order).unwrap().0).is_some() {
                continue 'cand;
            }
        }
        minimal.retain(|kept| {
            kept.leading(order)
                .unwrap()
                .0
                .checked_div(gm)
                .is_none()
        });
        minimal.push(g.clone());
    }
    let mut reduced: Vec<QPoly> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<QPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let r = normal_form(&minimal[i], &others, order);
        debug_assert!(!r.is_zero());
        reduced.push(r.monic(order));
    }
    reduced.sort_by(|a, b| order.cmp(a.leading(order).unwrap().0, b.leading(order).unwrap().0));
    reduced
}

/// Zero normal form against the basis of the generated ideal.
pub fn ideal_contains(gens: &[QPoly], f: &QPoly) -> bool {
    let gb = groebner_basis(gens, TermOrder::GrevLex);
    normal_form(f, &gb, TermOrder::GrevLex).is_zero()
}

/// Generators of the elimination ideal `I` intersected with the subring in the
/// variables after the first `drop` ones; output polynomials keep the original
/// variable indexing.
pub fn eliminate_first(gens: &[QPoly], drop: usize) -> Vec<QPoly> {
    let gb = groebner_basis(gens, TermOrder::Elimination(drop));
    gb.into_iter()
        .filter(|g| g.terms().all(|(m, _)| m.0[..drop].iter().all(|&e| e == 0)))
        .collect()
}

/// Krull dimension of `R/I`, via maximal independent sets modulo the leading
/// ideal of a grevlex basis. `None` means the unit ideal.
pub fn dimension(gens: &[QPoly], nvars: usize) -> Option<usize> {
    let gb = groebner_basis(gens, TermOrder::GrevLex);
    if gb.iter().any(|g| {
        g.leading(TermOrder::GrevLex)
            .map(|(m, _)| m.degree() == 0)
            .unwrap_or(false)
    }) {
        return None;
    }
    let lead: Vec<Monomial> = gb
        .iter()
        .map(|g| g.leading(TermOrder::GrevLex).unwrap().0.clone())
        .collect();
    let mut best = 0usize;
    for mask in 0u32..(1 << nvars) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let independent = lead.iter().all(|m| {
            // Support must escape the candidate set.
            m.0.iter()
                .enumerate()
                .any(|(i, &e)| e > 0 && mask & (1 << i) == 0)
        });
        if independent {
            best = size;
        }
    }
    Some(best)
}

/// Smallest-degree nonzero element of the reduced grevlex basis, if principal.
pub fn principal_generator(gens: &[QPoly]) -> Option<QPoly> {
    let gb = groebner_basis(gens, TermOrder::GrevLex);
    if gb.len() == 1 {
        Some(gb[0].clone())
    } else {
        None
    }
}

/// Exact division `num / den`, when it is exact. Used by fraction-free passes.
pub fn exact_div(num: &QPoly, den: &QPoly) -> Result<QPoly> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let order = TermOrder::GrevLex;
    let nvars = num.nvars();
    let mut cur = num.clone();
    let mut quot = QPoly::zero(nvars);
    let (dm, dc) = den.leading(order).map(|(m, c)| (m.clone(), c.clone())).unwrap();
    while let Some((lm, lc)) = cur.leading(order).map(|(m, c)| (m.clone(), c.clone())) {
        let q = lm
            .checked_div(&dm)
            .ok_or_else(|| Error::InvalidInput("division is not exact".into()))?;
        let factor = &lc / &dc;
        quot.add_term(q.clone(), factor.clone());
        cur = cur.sub(&den.mul_term(&q, &factor));
    }
    Ok(quot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> QPoly {
        super::super::poly::parse_poly(s, n).unwrap()
    }

    #[test]
    fn membership_in_linear_chain() {
        let gens = [p("x1 - x2", 3), p("x2 - x3", 3)];
        assert!(ideal_contains(&gens, &p("x1 - x3", 3)));
        assert!(!ideal_contains(&gens, &p("x1", 3)));
        assert!(ideal_contains(&gens, &p("x1 - 3x2 + 2x3", 3)));
    }

    #[test]
    fn twisted_cubic_relation() {
        // I = (x1^2 - x2, x1*x2 - x3) contains x1*x3 - x2^2.
        let gens = [p("x1^2 - x2", 3), p("x1*x2 - x3", 3)];
        assert!(ideal_contains(&gens, &p("x1*x3 - x2^2", 3)));
        assert!(!ideal_contains(&gens, &p("x1*x3 - x2", 3)));
    }

    #[test]
    fn elimination_matches_oracles() {
        // Dropping x1 from (x1 - x2, x2 - x3) leaves (x2 - x3).
        let e = eliminate_first(&[p("x1 - x2", 3), p("x2 - x3", 3)], 1);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].primitive(), p("x2 - x3", 3));
        // Dropping x1 from (x1 - x2^2) leaves nothing.
        let e = eliminate_first(&[p("x1 - x2^2", 2)], 1);
        assert!(e.is_empty());
        // An ideal not involving x1 is unchanged.
        let e = eliminate_first(&[p("x2 - x3", 3)], 1);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].primitive(), p("x2 - x3", 3));
    }

    #[test]
    fn dimension_of_standard_ideals() {
        assert_eq!(dimension(&[], 3), Some(3));
        assert_eq!(dimension(&[p("x1", 3), p("x2", 3), p("x3", 3)], 3), Some(0));
        assert_eq!(dimension(&[p("x1 - x2", 3), p("x2 - x3", 3)], 3), Some(1));
        assert_eq!(dimension(&[p("x1 - x2", 3)], 3), Some(2));
        assert_eq!(dimension(&[p("1", 3)], 3), None);
        // Twisted cubic is a curve.
        assert_eq!(dimension(&[p("x1^2 - x2", 3), p("x1*x2 - x3", 3)], 3), Some(1));
    }

    #[test]
    fn principal_detection() {
        assert!(principal_generator(&[p("x1 - x2", 2)]).is_some());
        assert!(principal_generator(&[p("x1", 2), p("x2", 2)]).is_none());
        // Redundant presentations collapse.
        let g = principal_generator(&[p("x1 - x2", 2), p("2x1 - 2x2", 2)]).unwrap();
        assert_eq!(g.primitive(), p("x1 - x2", 2));
    }

    #[test]
    fn exact_division_recovers_cofactor() {
        let f = p("x1^2 - x2^2", 2);
        let d = p("x1 - x2", 2);
        assert_eq!(exact_div(&f, &d).unwrap(), p("x1 + x2", 2));
        assert!(exact_div(&p("x1^2 + x2", 2), &d).is_err());
    }
}
