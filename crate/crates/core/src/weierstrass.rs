//! Weierstrass division and preparation in the truncated local ring, plus the
//! finiteness decomposition over the subring generated by a distinguished
//! polynomial.
//!
//! Division is organized by the grading in the trailing variables: for each
//! trailing monomial the coefficient is a univariate polynomial in the leading
//! variable, and division by `F` reduces to division by the unit-rescaled
//! `t1^a`. Carrying the univariate data to degree `a*(D+1)` internally makes
//! the returned quotient and remainder the exact truncation of the untruncated
//! answer, so prepared factors round-trip bit-exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::coeff::{Context, PadicScalar};
use crate::error::{Error, Result};
use crate::series::{Coords, Monomial, MultiSeries};

/// Outcome of dividing `G` by a regular `F`: the identity
/// `G = quotient * F + sum remainders[i] * t1^i` holds to truncation, and each
/// remainder is a series in the trailing variables only.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisionResult {
    pub quotient: MultiSeries,
    pub remainders: Vec<MultiSeries>,
    pub regular_order: u32,
}

/// `F = distinguished * unit` with the distinguished factor monic in the
/// leading variable and its lower coefficients vanishing at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassFactorization {
    pub distinguished: MultiSeries,
    pub unit: MultiSeries,
    pub degree: u32,
}

/// Sweep order of the convolution inside division. Exact coefficient
/// arithmetic makes the result independent of it; the acceptance suite checks
/// exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    Ascending,
    Descending,
}

/// The order in the leading variable of `F` restricted to the leading axis,
/// together with the leading coefficient.
pub fn regularity_order(f: &MultiSeries) -> Result<(u32, PadicScalar)> {
    let mut best: Option<(u32, PadicScalar)> = None;
    for (m, c) in f.terms() {
        if c.is_negligible() {
            continue;
        }
        if m.0[1..].iter().all(|&e| e == 0) {
            let k = m.0[0];
            if best.as_ref().map_or(true, |(b, _)| k < *b) {
                best = Some((k, c.clone()));
            }
        }
    }
    best.ok_or(Error::NotRegular)
}

/// Univariate helpers on dense coefficient vectors indexed by degree in the
/// leading variable. A missing entry is zero.
struct UPoly(Vec<PadicScalar>);

impl UPoly {
    fn zero() -> Self {
        UPoly(Vec::new())
    }

    fn get(&self, i: usize) -> Option<&PadicScalar> {
        self.0.get(i).filter(|c| !c.is_negligible())
    }

    fn add_at(&mut self, ctx: Context, i: usize, c: &PadicScalar) -> Result<()> {
        if c.is_negligible() {
            return Ok(());
        }
        while self.0.len() <= i {
            self.0.push(PadicScalar::zero(ctx));
        }
        self.0[i] = self.0[i].add(c)?;
        Ok(())
    }

    fn mul_acc(&mut self, ctx: Context, a: &UPoly, b: &UPoly, sign_neg: bool, cap: usize) -> Result<()> {
        for (i, ca) in a.0.iter().enumerate() {
            if ca.is_negligible() {
                continue;
            }
            for (j, cb) in b.0.iter().enumerate() {
                if i + j > cap {
                    break;
                }
                if cb.is_negligible() {
                    continue;
                }
                let p = ca.mul(cb)?;
                self.add_at(ctx, i + j, &if sign_neg { p.neg() } else { p })?;
            }
        }
        Ok(())
    }

    /// Inverse of a unit polynomial up to degree `cap`.
    fn invert(&self, ctx: Context, cap: usize) -> Result<UPoly> {
        let lead = self.get(0).cloned().ok_or(Error::NotAUnit)?;
        let lead_inv = lead.inv()?;
        let mut inv = UPoly(vec![lead_inv.clone()]);
        for j in 1..=cap {
            let mut acc = PadicScalar::zero(ctx);
            for k in 1..=j {
                if let (Some(vk), Some(ij)) = (self.get(k), inv.0.get(j - k)) {
                    acc = acc.add(&vk.mul(ij)?)?;
                }
            }
            inv.0.push(acc.neg().mul(&lead_inv)?);
        }
        Ok(inv)
    }

    fn shift_down(&self, a: usize) -> UPoly {
        if self.0.len() <= a {
            UPoly::zero()
        } else {
            UPoly(self.0[a..].to_vec())
        }
    }
}

/// View of a series as a map from trailing-variable monomials to univariate
/// polynomials in the leading variable.
fn graded_view(f: &MultiSeries) -> BTreeMap<Monomial, UPoly> {
    let ctx = *f.context();
    let mut view: BTreeMap<Monomial, UPoly> = BTreeMap::new();
    for (m, c) in f.terms() {
        if c.is_negligible() {
            continue;
        }
        let gamma = Monomial(m.0[1..].to_vec());
        let entry = view.entry(gamma).or_insert_with(UPoly::zero);
        entry
            .add_at(ctx, m.0[0] as usize, c)
            .expect("distinct stored monomials cannot collide");
    }
    view
}

/// Weierstrass division with the default ascending sweep.
pub fn divide(g: &MultiSeries, f: &MultiSeries) -> Result<DivisionResult> {
    divide_with_order(g, f, SweepOrder::Ascending)
}

pub fn divide_with_order(
    g: &MultiSeries,
    f: &MultiSeries,
    sweep: SweepOrder,
) -> Result<DivisionResult> {
    if g.context() != f.context() || g.nvars() != f.nvars() {
        return Err(Error::ContextMismatch);
    }
    if g.coords() != f.coords() {
        return Err(Error::CoordinateMismatch);
    }
    let ctx = *f.context();
    let n = f.nvars();
    let d = ctx.trunc_degree();
    let (a, _) = regularity_order(f)?;
    if a == 0 {
        // F is a unit; nothing to divide out.
        let quotient = g.mul(&f.invert()?)?;
        return Ok(DivisionResult { quotient, remainders: Vec::new(), regular_order: 0 });
    }
    let a = a as usize;
    // Internal cap in the leading variable; high enough that truncation never
    // leaks into the reported coefficients.
    let cap = a * (d as usize + 2);

    let f_view = graded_view(f);
    let g_view = graded_view(g);
    let f_axis = f_view.get(&Monomial::unit(n - 1)).ok_or(Error::NotRegular)?;
    let v_inv = f_axis.shift_down(a).invert(ctx, cap)?;

    // All trailing monomials of total degree <= D, graded-lex ascending.
    let gammas = enumerate_monomials(n - 1, d);
    let mut quotients: BTreeMap<Monomial, UPoly> = BTreeMap::new();
    let mut remainders: Vec<MultiSeries> = (0..a)
        .map(|_| MultiSeries::zero(ctx, n - 1, f.coords()))
        .collect();
    let mut quotient = MultiSeries::zero(ctx, n, f.coords());

    let mut f_keys: Vec<&Monomial> = f_view.keys().filter(|k| k.degree() > 0).collect();
    if sweep == SweepOrder::Descending {
        f_keys.reverse();
    }

    for gamma in &gammas {
        let mut rhs = UPoly::zero();
        if let Some(gp) = g_view.get(gamma) {
            for (i, c) in gp.0.iter().enumerate() {
                rhs.add_at(ctx, i, c)?;
            }
        }
        for fk in &f_keys {
            if let Some(prev_gamma) = gamma.checked_div(fk) {
                if let Some(uq) = quotients.get(&prev_gamma) {
                    rhs.mul_acc(ctx, &f_view[*fk], uq, true, cap)?;
                }
            }
        }
        // Remainder: the leading-degree < a part, truncated to total degree
        // D - i so that the distinguished polynomial assembled from it stays
        // within the truncation.
        for i in 0..a {
            if let Some(c) = rhs.get(i) {
                if gamma.degree() + (i as u32) <= d {
                    remainders[i].add_term(gamma.clone(), c.clone())?;
                }
            }
        }
        // Quotient level: (rhs div t1^a) * V^{-1}.
        let mut uq = UPoly::zero();
        uq.mul_acc(ctx, &rhs.shift_down(a), &v_inv, false, cap)?;
        for (j, c) in uq.0.iter().enumerate() {
            if c.is_negligible() || gamma.degree() + (j as u32) > d {
                continue;
            }
            let mut exp = vec![j as u32];
            exp.extend_from_slice(&gamma.0);
            quotient.add_term(Monomial(exp), c.clone())?;
        }
        quotients.insert(gamma.clone(), uq);
    }

    Ok(DivisionResult { quotient, remainders, regular_order: a as u32 })
}

/// All monomials in `nvars` variables of total degree at most `d`, graded-lex
/// ascending.
pub fn enumerate_monomials(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, idx: usize, remaining: u32) {
        if idx == cur.len() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=remaining {
            cur[idx] = e;
            rec(out, cur, idx + 1, remaining - e);
        }
        cur[idx] = 0;
    }
    let mut raw = Vec::new();
    let mut cur = vec![0u32; nvars];
    for total in 0..=d {
        if nvars == 0 {
            if total == 0 {
                raw.push(Vec::new());
            }
            continue;
        }
        rec(&mut raw, &mut cur, 0, total);
    }
    let mut ms: Vec<Monomial> = raw.into_iter().map(Monomial).collect();
    ms.sort();
    ms
}

/// Weierstrass preparation `F = W * U`.
pub fn prepare(f: &MultiSeries) -> Result<WeierstrassFactorization> {
    let ctx = *f.context();
    let n = f.nvars();
    let (a, _) = regularity_order(f)?;
    if a == 0 {
        return Ok(WeierstrassFactorization {
            distinguished: MultiSeries::one(ctx, n, f.coords()),
            unit: f.clone(),
            degree: 0,
        });
    }
    let t1_pow = {
        let mut e = vec![0u32; n];
        e[0] = a;
        MultiSeries::from_int_terms(ctx, n, f.coords(), &[(e, 1)])?
    };
    let div = divide(&t1_pow, f)?;
    let mut w = t1_pow;
    for (i, r) in div.remainders.iter().enumerate() {
        w = w.sub(&embed_trailing(r, i as u32)?)?;
    }
    if !div.quotient.is_unit() {
        return Err(Error::PrecisionExhausted { loss: ctx.precision(), precision: ctx.precision() });
    }
    let unit = div.quotient.invert()?;
    Ok(WeierstrassFactorization { distinguished: w, unit, degree: a })
}

/// Re-embeds a trailing-variable series as `s * t1^i` in the full ring.
pub fn embed_trailing(s: &MultiSeries, i: u32) -> Result<MultiSeries> {
    let ctx = *s.context();
    let n = s.nvars() + 1;
    let mut out = MultiSeries::zero(ctx, n, s.coords());
    for (m, c) in s.terms() {
        let mut exp = vec![i];
        exp.extend_from_slice(&m.0);
        out.add_term(Monomial(exp), c.clone())?;
    }
    Ok(out)
}

/// Writes `g = sum_i f_i(p, x_2, .., x_n) * x1^i` by iterated division; the
/// returned series use a fresh leading variable standing for `p`.
pub fn finite_decompose(g: &MultiSeries, p: &MultiSeries) -> Result<Vec<MultiSeries>> {
    let ctx = *g.context();
    let n = g.nvars();
    let d = ctx.trunc_degree();
    let (a, lead) = regularity_order(p)?;
    if a == 0 {
        return Err(Error::NotRegular);
    }
    if !lead.congruent(&PadicScalar::one(ctx)) {
        return Err(Error::InvalidInput("distinguished polynomial must be monic".into()));
    }
    // Distinguished shape: on the leading axis p is exactly t1^a.
    for (m, c) in p.terms() {
        if c.is_negligible() {
            continue;
        }
        let pure_axis = m.0[1..].iter().all(|&e| e == 0);
        if pure_axis && m.0[0] != a {
            return Err(Error::InvalidInput(
                "distinguished polynomial must restrict to a single power on the leading axis"
                    .into(),
            ));
        }
        if !pure_axis && m.0[0] >= a {
            return Err(Error::InvalidInput(
                "distinguished polynomial has trailing terms of leading degree >= its order".into(),
            ));
        }
    }
    if p.order() == Some(0) {
        return Err(Error::TruncationTooSmall);
    }
    let mut residual = g.clone();
    let mut layers: Vec<Vec<MultiSeries>> = Vec::new();
    for _k in 0..=d {
        if residual.is_zero() {
            break;
        }
        let div = divide(&residual, p)?;
        layers.push(div.remainders);
        residual = div.quotient;
    }
    let mut out = Vec::with_capacity(a as usize);
    for i in 0..a as usize {
        let mut f_i = MultiSeries::zero(ctx, n, Coords::X);
        for (k, layer) in layers.iter().enumerate() {
            for (m, c) in layer[i].terms() {
                let mut exp = vec![k as u32];
                exp.extend_from_slice(&m.0);
                f_i.add_term(Monomial(exp), c.clone())?;
            }
        }
        out.push(f_i);
    }
    Ok(out)
}

/// A seeded invertible scalar-diagonal plus variable-permutation coordinate
/// change. The library never applies it silently; callers facing `NotRegular`
/// opt in and keep the record.
#[derive(Debug, Clone)]
pub struct CoordinateShuffle {
    pub permutation: Vec<usize>,
    pub scales: Vec<PadicScalar>,
}

impl CoordinateShuffle {
    pub fn random(ctx: Context, nvars: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut permutation: Vec<usize> = (0..nvars).collect();
        for i in (1..nvars).rev() {
            let j = rng.gen_range(0..=i);
            permutation.swap(i, j);
        }
        let scales = (0..nvars)
            .map(|_| {
                let l = ctx.prime();
                loop {
                    let u = rng.gen_range(1..l * l);
                    if u % l != 0 {
                        return PadicScalar::from_integer(ctx, u as i64);
                    }
                }
            })
            .collect();
        CoordinateShuffle { permutation, scales }
    }

    /// Substitutes variable `i` by `scales[i] * v_{permutation[i]}`.
    pub fn apply(&self, f: &MultiSeries) -> Result<MultiSeries> {
        let ctx = *f.context();
        let n = f.nvars();
        let mut out = MultiSeries::zero(ctx, n, f.coords());
        for (m, c) in f.terms() {
            let mut exp = vec![0u32; n];
            let mut coeff = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                exp[self.permutation[i]] += e;
                coeff = coeff.mul(&self.scales[i].pow(e as i64)?)?;
            }
            out.add_term(Monomial(exp), coeff)?;
        }
        Ok(out)
    }
}

/// Assembles `quotient * F + sum remainders[i] * t1^i`; test oracles compare
/// this against the dividend.
pub fn recompose(div: &DivisionResult, f: &MultiSeries) -> Result<MultiSeries> {
    let mut acc = div.quotient.mul(f)?;
    for (i, r) in div.remainders.iter().enumerate() {
        acc = acc.add(&embed_trailing(r, i as u32)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> Context {
        Context::new(5, 6, d).unwrap()
    }

    fn poly(c: Context, nv: usize, terms: &[(Vec<u32>, i64)]) -> MultiSeries {
        MultiSeries::from_int_terms(c, nv, Coords::T, terms).unwrap()
    }

    #[test]
    fn regularity_reads_the_leading_axis() {
        let c = ctx(6);
        let f = poly(c, 2, &[(vec![2, 0], 1), (vec![0, 1], 1)]);
        assert_eq!(regularity_order(&f).unwrap().0, 2);
        let g = poly(c, 2, &[(vec![0, 1], 1)]);
        assert!(matches!(regularity_order(&g), Err(Error::NotRegular)));
        let h = poly(c, 2, &[(vec![1, 0], 3), (vec![1, 1], 1)]);
        assert_eq!(regularity_order(&h).unwrap().0, 1);
    }

    #[test]
    fn self_division_is_trivial() {
        let c = ctx(6);
        let f = poly(c, 2, &[(vec![2, 0], 1), (vec![0, 1], 1)]);
        let div = divide(&f, &f).unwrap();
        assert_eq!(div.quotient, MultiSeries::one(c, 2, Coords::T));
        assert!(div.remainders.iter().all(|r| r.is_zero()));
    }

    #[test]
    fn already_reduced_dividend() {
        let c = ctx(6);
        let f = poly(c, 2, &[(vec![2, 0], 1), (vec![0, 1], 1)]);
        let g = poly(c, 2, &[(vec![0, 1], 1)]);
        let div = divide(&g, &f).unwrap();
        assert!(div.quotient.is_zero());
        assert_eq!(div.remainders[0], poly(c, 1, &[(vec![1], 1)]));
        assert!(div.remainders[1].is_zero());
    }

    #[test]
    fn cube_by_t1_squared_plus_t2() {
        // t1^3 = t1*(t1^2 + t2) - t1*t2.
        let c = ctx(6);
        let f = poly(c, 2, &[(vec![2, 0], 1), (vec![0, 1], 1)]);
        let g = poly(c, 2, &[(vec![3, 0], 1)]);
        let div = divide(&g, &f).unwrap();
        assert_eq!(div.quotient, poly(c, 2, &[(vec![1, 0], 1)]));
        assert!(div.remainders[0].is_zero());
        assert_eq!(div.remainders[1], poly(c, 1, &[(vec![1], -1)]));
        assert_eq!(recompose(&div, &f).unwrap(), g);
    }

    #[test]
    fn division_identity_on_samples() {
        let c = ctx(5);
        let f = poly(c, 3, &[(vec![1, 0, 0], 2), (vec![0, 1, 0], 1), (vec![1, 1, 1], 3)]);
        let g = poly(c, 3, &[(vec![2, 1, 0], 1), (vec![0, 0, 2], 4), (vec![1, 0, 0], 1)]);
        let div = divide(&g, &f).unwrap();
        assert_eq!(recompose(&div, &f).unwrap(), g);
        let dsc = divide_with_order(&g, &f, SweepOrder::Descending).unwrap();
        assert_eq!(div.quotient, dsc.quotient);
        assert_eq!(div.remainders, dsc.remainders);
    }

    #[test]
    fn prepare_already_distinguished() {
        let c = ctx(6);
        let f = poly(c, 2, &[(vec![2, 0], 1), (vec![0, 1], 1)]);
        let w = prepare(&f).unwrap();
        assert_eq!(w.degree, 2);
        assert_eq!(w.distinguished, f);
        assert_eq!(w.unit, MultiSeries::one(c, 2, Coords::T));
    }

    #[test]
    fn prepare_splits_off_the_unit() {
        let c = ctx(6);
        // t1*(1 + t2)
        let f = poly(c, 2, &[(vec![1, 0], 1), (vec![1, 1], 1)]);
        let w = prepare(&f).unwrap();
        assert_eq!(w.distinguished, poly(c, 2, &[(vec![1, 0], 1)]));
        assert_eq!(w.unit, poly(c, 2, &[(vec![0, 0], 1), (vec![0, 1], 1)]));
    }

    #[test]
    fn prepare_linear_shift() {
        let c = ctx(6);
        // t1 + t1^2 - t2 - t1*t2 = (t1 - t2)(1 + t1).
        let f = poly(c, 2, &[(vec![1, 0], 1), (vec![2, 0], 1), (vec![0, 1], -1), (vec![1, 1], -1)]);
        let w = prepare(&f).unwrap();
        assert_eq!(w.distinguished, poly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -1)]));
        assert_eq!(w.unit, poly(c, 2, &[(vec![0, 0], 1), (vec![1, 0], 1)]));
        assert_eq!(w.distinguished.mul(&w.unit).unwrap(), f);
    }

    #[test]
    fn finite_decomposition_cases() {
        let c = ctx(6);
        let x = |terms: &[(Vec<u32>, i64)]| {
            MultiSeries::from_int_terms(c, 2, Coords::X, terms).unwrap()
        };
        let p = x(&[(vec![2, 0], 1), (vec![0, 1], 1)]);
        // g = p: f_0 = y.
        let fs = finite_decompose(&p, &p).unwrap();
        assert_eq!(fs[0], x(&[(vec![1, 0], 1)]));
        assert!(fs[1].is_zero());
        // g = x2: f_0 = the second variable itself.
        let fs = finite_decompose(&x(&[(vec![0, 1], 1)]), &p).unwrap();
        assert_eq!(fs[0], x(&[(vec![0, 1], 1)]));
        assert!(fs[1].is_zero());
        // g = x1^3: f_1 = y - x2.
        let fs = finite_decompose(&x(&[(vec![3, 0], 1)]), &p).unwrap();
        assert!(fs[0].is_zero());
        assert_eq!(fs[1], x(&[(vec![1, 0], 1), (vec![0, 1], -1)]));
        // Substitution-back oracle: g = sum f_i(p, x2) * x1^i.
        let g = x(&[(vec![3, 0], 1)]);
        let x1 = MultiSeries::variable(c, 2, Coords::X, 0);
        let x2 = MultiSeries::variable(c, 2, Coords::X, 1);
        let mut acc = MultiSeries::zero(c, 2, Coords::X);
        for (i, f_i) in fs.iter().enumerate() {
            let composed = f_i.substitute(&[p.clone(), x2.clone()]).unwrap();
            acc = acc.add(&composed.mul(&x1.pow(i as u32).unwrap()).unwrap()).unwrap();
        }
        assert_eq!(acc, g);
    }

    #[test]
    fn shuffle_regularizes_a_trailing_variable() {
        let c = ctx(6);
        let g = poly(c, 2, &[(vec![0, 1], 1)]);
        assert!(regularity_order(&g).is_err());
        for seed in 0..8 {
            let shuffle = CoordinateShuffle::random(c, 2, seed);
            let h = shuffle.apply(&g).unwrap();
            if regularity_order(&h).is_ok() {
                return;
            }
        }
        panic!("no seed produced a regularizing shuffle");
    }
}
