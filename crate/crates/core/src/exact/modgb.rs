//! Groebner bases for submodules of free modules, position-over-term order.
//! The one consumer is syzygy computation, which in turn drives free
//! resolutions and module-level cohomology tests.

use num_rational::BigRational;

use crate::series::Monomial;

use super::poly::{QPoly, TermOrder};

/// An element of the free module `R^k`: one polynomial per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecPoly {
    pub comps: Vec<QPoly>,
}

impl VecPoly {
    pub fn zero(nvars: usize, k: usize) -> Self {
        VecPoly { comps: vec![QPoly::zero(nvars); k] }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn sub(&self, other: &VecPoly) -> VecPoly {
        VecPoly {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> VecPoly {
        VecPoly { comps: self.comps.iter().map(|p| p.mul_term(m, c)).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> VecPoly {
        VecPoly { comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    /// Leading (position, monomial, coefficient) under position-over-term:
    /// lower positions dominate, grevlex within a position.
    pub fn leading(&self) -> Option<(usize, &Monomial, &BigRational)> {
        for (pos, p) in self.comps.iter().enumerate() {
            if let Some((m, c)) = p.leading(TermOrder::GrevLex) {
                return Some((pos, m, c));
            }
        }
        None
    }

    pub fn monic(&self) -> VecPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, _, c)) => self.scale(&c.recip()),
        }
    }
}

fn lcm(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial(a.0.iter().zip(&b.0).map(|(x, y)| *x.max(y)).collect())
}

/// Reduces the leading term of `f` against `basis` until stuck; the remainder
/// of the whole vector is then built term by term, as in the scalar case.
fn normal_form(f: &VecPoly, basis: &[VecPoly], nvars: usize, k: usize) -> VecPoly {
    let mut rem = VecPoly::zero(nvars, k);
    let mut cur = f.clone();
    'outer: while let Some((pos, lm, lc)) =
        cur.leading().map(|(p, m, c)| (p, m.clone(), c.clone()))
    {
        for g in basis {
            if let Some((gpos, gm, gc)) = g.leading() {
                if gpos == pos {
                    if let Some(q) = lm.checked_div(gm) {
                        let factor = &lc / gc;
                        cur = cur.sub(&g.mul_term(&q, &factor));
                        continue 'outer;
                    }
                }
            }
        }
        rem.comps[pos].add_term(lm.clone(), lc.clone());
        let mut t = VecPoly::zero(nvars, k);
        t.comps[pos] = QPoly::monomial(nvars, lm.0, lc);
        cur = cur.sub(&t);
    }
    rem
}

/// Buchberger over the free module; S-vectors only exist between elements
/// whose leading terms sit in the same position.
pub fn module_groebner(gens: &[VecPoly], nvars: usize, k: usize) -> Vec<VecPoly> {
    let mut basis: Vec<VecPoly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.monic())
        .collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (0..i).map(move |j| (j, i)))
        .collect();
    while let Some((i, j)) = pairs.pop() {
        let s = {
            let (pi, mi, ci) = basis[i].leading().unwrap();
            let (pj, mj, cj) = basis[j].leading().unwrap();
            if pi != pj {
                continue;
            }
            let l = lcm(mi, mj);
            let qi = l.checked_div(mi).unwrap();
            let qj = l.checked_div(mj).unwrap();
            basis[i]
                .mul_term(&qi, &ci.recip())
                .sub(&basis[j].mul_term(&qj, &cj.recip()))
        };
        let r = normal_form(&s, &basis, nvars, k);
        if !r.is_zero() {
            for t in 0..basis.len() {
                pairs.push((t, basis.len()));
            }
            basis.push(r.monic());
        }
    }
    basis
}

/// Generators of the syzygy module of the given vectors `f_1..f_c` in `R^r`:
/// all `(a_1..a_c)` with `sum a_j f_j = 0`. Computed by the augmented-module
/// elimination trick in `R^(r+c)`.
pub fn syzygies(columns: &[VecPoly], nvars: usize, r: usize) -> Vec<VecPoly> {
    let c = columns.len();
    if c == 0 {
        return Vec::new();
    }
    let mut augmented = Vec::with_capacity(c);
    for (j, col) in columns.iter().enumerate() {
        let mut v = VecPoly::zero(nvars, r + c);
        v.comps[..r].clone_from_slice(&col.comps);
        v.comps[r + j] = QPoly::one(nvars);
        augmented.push(v);
    }
    let gb = module_groebner(&augmented, nvars, r + c);
    let mut out = Vec::new();
    for g in gb {
        if g.comps[..r].iter().all(|p| p.is_zero()) {
            let tail = VecPoly { comps: g.comps[r..].to_vec() };
            if !tail.is_zero() {
                out.push(tail.monic());
            }
        }
    }
    // Canonical order for reproducible resolutions.
    out.sort_by(|a, b| {
        let (pa, ma, _) = a.leading().unwrap();
        let (pb, mb, _) = b.leading().unwrap();
        pa.cmp(&pb).then_with(|| TermOrder::GrevLex.cmp(ma, mb))
    });
    out
}

/// Does `target` lie in the submodule of `R^r` generated by `gens`?
pub fn submodule_contains(gens: &[VecPoly], target: &VecPoly, nvars: usize, r: usize) -> bool {
    if target.is_zero() {
        return true;
    }
    let gb = module_groebner(gens, nvars, r);
    normal_form(target, &gb, nvars, r).is_zero()
}

/// Convenience: the columns of a matrix (rows of `QPoly`) as vectors.
pub fn matrix_columns(rows: &[Vec<QPoly>]) -> Vec<VecPoly> {
    let r = rows.len();
    if r == 0 {
        return Vec::new();
    }
    let c = rows[0].len();
    (0..c)
        .map(|j| VecPoly { comps: (0..r).map(|i| rows[i][j].clone()).collect() })
        .collect()
}

/// Rebuilds a matrix whose columns are the given vectors.
pub fn columns_to_matrix(cols: &[VecPoly], r: usize) -> Vec<Vec<QPoly>> {
    (0..r)
        .map(|i| cols.iter().map(|col| col.comps[i].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::poly::parse_poly;
    use num_traits::One;

    fn v(strings: &[&str], n: usize) -> VecPoly {
        VecPoly { comps: strings.iter().map(|s| parse_poly(s, n).unwrap()).collect() }
    }

    #[test]
    fn koszul_syzygy_of_two_variables() {
        // Columns (x1), (x2) in R^1: the syzygy module is generated by
        // (x2, -x1).
        let cols = vec![v(&["x1"], 2), v(&["x2"], 2)];
        let syz = syzygies(&cols, 2, 1);
        assert_eq!(syz.len(), 1);
        let s = &syz[0];
        let combo = s.comps[0]
            .mul(&parse_poly("x1", 2).unwrap())
            .add(&s.comps[1].mul(&parse_poly("x2", 2).unwrap()));
        assert!(combo.is_zero());
        let expected = v(&["x2", "-x1"], 2);
        assert!(s == &expected || s == &expected.scale(&-BigRational::one()));
    }

    #[test]
    fn syzygies_annihilate_their_columns() {
        let rows = vec![
            vec![parse_poly("x1", 2).unwrap(), parse_poly("x2", 2).unwrap(), parse_poly("x1 + x2", 2).unwrap()],
            vec![parse_poly("x2", 2).unwrap(), parse_poly("0", 2).unwrap(), parse_poly("x2", 2).unwrap()],
        ];
        let cols = matrix_columns(&rows);
        let syz = syzygies(&cols, 2, 2);
        assert!(!syz.is_empty());
        for s in &syz {
            for i in 0..2 {
                let mut acc = QPoly::zero(2);
                for (j, col) in cols.iter().enumerate() {
                    acc = acc.add(&col.comps[i].mul(&s.comps[j]));
                }
                assert!(acc.is_zero());
            }
        }
        // The visible relation col3 = col1 + col2 appears.
        let target = v(&["1", "1", "-1"], 2);
        assert!(submodule_contains(&syz, &target, 2, 3));
    }

    #[test]
    fn submodule_membership() {
        let gens = vec![v(&["x1", "0"], 2), v(&["0", "x2"], 2)];
        assert!(submodule_contains(&gens, &v(&["x1*x2", "x2^2"], 2), 2, 2));
        assert!(!submodule_contains(&gens, &v(&["x2", "0"], 2), 2, 2));
    }
}
