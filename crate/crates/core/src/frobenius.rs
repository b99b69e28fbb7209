//! The diagonal Frobenius action on series, unit trivialization, and
//! eigen-homogenization of principal equivariant generators.
//!
//! In logarithmic coordinates the action is diagonal, `x_i -> alpha_i * x_i`;
//! in the group-like coordinates it is the substitution
//! `t_i -> (1 + t_i)^alpha_i - 1`, computed through exp and log. The two
//! descriptions are intertwined by the coordinate change, which is the
//! module's flagship test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{Context, PadicScalar};
use crate::error::{Error, Result};
use crate::exact::QPoly;
use crate::series::{Coords, Monomial, MultiSeries};

/// Diagonal automorphism data: unit eigenvalues, a declared weight tag, and
/// the power the action is raised to. Eigenvalues are kept both as exact
/// rationals (for the polynomial-exact paths) and as scalars.
#[derive(Debug, Clone)]
pub struct FrobeniusAction {
    ctx: Context,
    alphas_exact: Vec<BigRational>,
    alphas: Vec<PadicScalar>,
    weight: u32,
    power: u32,
}

impl FrobeniusAction {
    /// Validates that every eigenvalue is a unit and that no effective
    /// eigenvalue power up to the truncation degree is congruent to one; the
    /// graded solves of the trivialization divide by exactly those quantities.
    pub fn new(
        ctx: Context,
        alphas_exact: Vec<BigRational>,
        weight: u32,
        power: u32,
    ) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidInput("power must be >= 1".into()));
        }
        let l = BigInt::from(ctx.prime());
        let mut alphas = Vec::with_capacity(alphas_exact.len());
        for (i, a) in alphas_exact.iter().enumerate() {
            if a.is_zero() || (a.numer() % &l).is_zero() || (a.denom() % &l).is_zero() {
                return Err(Error::InvalidInput(format!(
                    "eigenvalue {} = {} is not a unit at {}",
                    i + 1,
                    a,
                    ctx.prime()
                )));
            }
            alphas.push(PadicScalar::from_ratio(ctx, a.numer(), a.denom())?);
        }
        let action = FrobeniusAction { ctx, alphas_exact, alphas, weight, power };
        let one = PadicScalar::one(ctx);
        for (i, _) in action.alphas.iter().enumerate() {
            let eff = action.effective_alpha(i)?;
            let mut p = PadicScalar::one(ctx);
            for j in 1..=ctx.trunc_degree().max(1) {
                p = p.mul(&eff)?;
                if p.congruent(&one) {
                    return Err(Error::SmallRootOfUnity { index: i, power: j * power });
                }
            }
        }
        Ok(action)
    }

    pub fn from_strs(ctx: Context, alphas: &[&str], weight: u32, power: u32) -> Result<Self> {
        let parsed: Result<Vec<BigRational>> = alphas.iter().map(|s| parse_rational(s)).collect();
        Self::new(ctx, parsed?, weight, power)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.alphas.len()
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn alpha(&self, i: usize) -> &PadicScalar {
        &self.alphas[i]
    }

    pub fn alpha_exact(&self, i: usize) -> &BigRational {
        &self.alphas_exact[i]
    }

    /// `alpha_i` raised to the stored power.
    pub fn effective_alpha(&self, i: usize) -> Result<PadicScalar> {
        self.alphas[i].pow(self.power as i64)
    }

    pub fn effective_alpha_exact(&self, i: usize) -> BigRational {
        pow_rational(&self.alphas_exact[i], self.power)
    }

    /// Same eigenvalues, different power.
    pub fn with_power(&self, power: u32) -> Result<Self> {
        Self::new(self.ctx, self.alphas_exact.clone(), self.weight, power)
    }

    /// Restriction to a suffix of the variables.
    pub fn restrict_tail(&self, from: usize) -> Result<Self> {
        Self::new(
            self.ctx,
            self.alphas_exact[from..].to_vec(),
            self.weight,
            self.power,
        )
    }

    /// The scalar `prod alpha_i^(power * beta_i)`.
    pub fn eigen_monomial(&self, beta: &Monomial) -> Result<PadicScalar> {
        let mut acc = PadicScalar::one(self.ctx);
        for (i, &e) in beta.0.iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&self.alphas[i].pow((self.power * e) as i64)?)?;
            }
        }
        Ok(acc)
    }

    pub fn eigen_monomial_exact(&self, beta: &Monomial) -> BigRational {
        let mut acc = BigRational::one();
        for (i, &e) in beta.0.iter().enumerate() {
            acc *= pow_rational(&self.alphas_exact[i], self.power * e);
        }
        acc
    }

    /// The action on a series: coefficientwise eigen-scaling in X
    /// coordinates, the binomial substitution in T coordinates.
    pub fn apply(&self, f: &MultiSeries) -> Result<MultiSeries> {
        if f.nvars() != self.nvars() || f.context() != &self.ctx {
            return Err(Error::ContextMismatch);
        }
        match f.coords() {
            Coords::X => f.map_coefficients(|m, c| c.mul(&self.eigen_monomial(m)?)),
            Coords::T => {
                let n = f.nvars();
                let exp1 = MultiSeries::exp_minus_one(self.ctx, 1, Coords::T, 0)?;
                let mut args = Vec::with_capacity(n);
                for i in 0..n {
                    let log_i = MultiSeries::log_one_plus(self.ctx, n, Coords::T, i)?;
                    let scaled = log_i.scalar_mul(&self.effective_alpha(i)?)?;
                    args.push(exp1.substitute(std::slice::from_ref(&scaled))?);
                }
                f.substitute(&args)
            }
        }
    }

    /// Diagonal action on an exact polynomial in X coordinates.
    pub fn apply_exact(&self, f: &QPoly) -> QPoly {
        let mut out = QPoly::zero(f.nvars());
        for (m, c) in f.terms() {
            out.add_term(m.clone(), c * self.eigen_monomial_exact(m));
        }
        out
    }
}

fn pow_rational(a: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= a;
    }
    acc
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator {den:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

/// Wire form: `{"alphas": [rational strings], "weight": w, "power": k}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrobeniusJson {
    pub alphas: Vec<String>,
    pub weight: u32,
    pub power: u32,
}

impl FrobeniusAction {
    pub fn to_json(&self) -> FrobeniusJson {
        FrobeniusJson {
            alphas: self.alphas_exact.iter().map(render_rational).collect(),
            weight: self.weight,
            power: self.power,
        }
    }

    pub fn from_json(ctx: Context, j: &FrobeniusJson) -> Result<Self> {
        let parsed: Result<Vec<BigRational>> =
            j.alphas.iter().map(|s| parse_rational(s)).collect();
        Self::new(ctx, parsed?, j.weight, j.power)
    }
}

fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Per-level loss record of a trivialization: the maximal valuation of the
/// divisors `alpha^beta - 1` among the coefficients actually solved at that
/// level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLoss {
    pub level: u32,
    pub divisor_valuation: u32,
}

/// Result of writing a unit as `u * h^phi = c * h`.
#[derive(Debug, Clone)]
pub struct UnitTrivialization {
    /// `c = u(0)`, fixing the normalization `h(0) = 1`.
    pub constant: PadicScalar,
    pub cofactor: MultiSeries,
    /// Sum of the per-level divisor valuations.
    pub loss: u32,
    pub levels: Vec<LevelLoss>,
}

/// Solves `u * h^phi = c * h` with `c = u(0)` and `h` in `1 + m`, level by
/// level: the degree-`v` obstruction is divided coefficientwise by
/// `alpha^beta - 1`, whose valuation is forfeited precision.
pub fn trivialize_unit(u: &MultiSeries, phi: &FrobeniusAction) -> Result<UnitTrivialization> {
    if u.coords() != Coords::X {
        return Err(Error::CoordinateMismatch);
    }
    if u.nvars() != phi.nvars() || u.context() != phi.context() {
        return Err(Error::ContextMismatch);
    }
    let ctx = *u.context();
    let c = u.constant_term();
    if c.is_negligible() {
        return Err(Error::NotAUnit);
    }
    let one = MultiSeries::one(ctx, u.nvars(), Coords::X);
    let mut h = one.clone();
    let mut levels: Vec<LevelLoss> = Vec::new();
    for level in 1..=ctx.trunc_degree() {
        let lhs = u.mul(&phi.apply(&h)?)?;
        let residual = lhs.mul(&h.scalar_mul(&c)?.invert()?)?.sub(&one)?;
        let obstruction = residual.homogeneous_part(level);
        if obstruction.is_zero() {
            continue;
        }
        let mut z = MultiSeries::zero(ctx, u.nvars(), Coords::X);
        let mut worst: u32 = 0;
        for (beta, r) in obstruction.terms() {
            if r.is_negligible() {
                continue;
            }
            let divisor = phi.eigen_monomial(beta)?.sub(&PadicScalar::one(ctx))?;
            if divisor.is_negligible() {
                return Err(Error::PrecisionExhausted {
                    loss: ctx.precision(),
                    precision: ctx.precision(),
                });
            }
            let e = divisor.valuation().unwrap_or(0).max(0) as u32;
            worst = worst.max(e);
            z.add_term(beta.clone(), r.neg().div(&divisor)?)?;
        }
        levels.push(LevelLoss { level, divisor_valuation: worst });
        h = h.mul(&one.add(&z)?)?;
    }
    let loss = levels.iter().map(|l| l.divisor_valuation).sum();
    Ok(UnitTrivialization { constant: c, cofactor: h, loss, levels })
}

/// Result of eigen-homogenizing a principal equivariant generator: `g = f * h`
/// is homogeneous, `g` transforms by the eigen-monomial constant `c`, and the
/// cocycle `u = f^phi / f` satisfies `u * h^phi = c * h`.
#[derive(Debug, Clone)]
pub struct TrivializationResult {
    pub constant: PadicScalar,
    pub cofactor: MultiSeries,
    pub homogeneous: MultiSeries,
    pub cocycle: MultiSeries,
    pub degree: u32,
    pub loss: u32,
    pub levels: Vec<LevelLoss>,
}

/// Checks `f^phi = u * f` by exact division, trivializes the unit, and
/// returns the homogeneous replacement generator.
pub fn homogenize_eigen(f: &MultiSeries, phi: &FrobeniusAction) -> Result<TrivializationResult> {
    if f.coords() != Coords::X {
        return Err(Error::CoordinateMismatch);
    }

    if f.order().map_or(true, |o| o == 0) {
        return Err(Error::NotEigenPrincipal);
    }
    let f_phi = phi.apply(f)?;
    let u = match f_phi.divide_exact(f)? {
        None => return Err(Error::NotEigenPrincipal),
        Some(u) => u,
    };
    if !u.is_unit() {
        return Err(Error::NotEigenPrincipal);
    }
    let triv = trivialize_unit(&u, phi)?;
    let g = f.mul(&triv.cofactor)?;
    if !g.is_homogeneous() {
        return Err(Error::NotEigenPrincipal);
    }
    let degree = g.order().ok_or(Error::NotEigenPrincipal)?;
    // The transformation constant must be the eigen-monomial of every
    // surviving exponent.
    for (beta, coeff) in g.terms() {
        if coeff.is_negligible() {
            continue;
        }
        if !phi.eigen_monomial(beta)?.congruent(&triv.constant) {
            return Err(Error::NotEigenPrincipal);
        }
    }
    let g_phi = phi.apply(&g)?;
    if g_phi != g.scalar_mul(&triv.constant)? {
        return Err(Error::NotEigenPrincipal);
    }
    Ok(TrivializationResult {
        constant: triv.constant,
        cofactor: triv.cofactor,
        homogeneous: g,
        cocycle: u,
        degree,
        loss: triv.loss,
        levels: triv.levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32, d: u32) -> Context {
        Context::new(5, n, d).unwrap()
    }

    fn phi(c: Context, alphas: &[&str]) -> FrobeniusAction {
        FrobeniusAction::from_strs(c, alphas, 1, 1).unwrap()
    }

    fn xpoly(c: Context, nv: usize, terms: &[(Vec<u32>, i64)]) -> MultiSeries {
        MultiSeries::from_int_terms(c, nv, Coords::X, terms).unwrap()
    }

    fn tpoly(c: Context, nv: usize, terms: &[(Vec<u32>, i64)]) -> MultiSeries {
        MultiSeries::from_int_terms(c, nv, Coords::T, terms).unwrap()
    }

    #[test]
    fn diagonal_action_in_log_coordinates() {
        let c = ctx(6, 4);
        let f = phi(c, &["2", "3"]);
        let m = xpoly(c, 2, &[(vec![2, 1], 1)]);
        // alpha1^2 * alpha2 = 12.
        assert_eq!(f.apply(&m).unwrap(), xpoly(c, 2, &[(vec![2, 1], 12)]));
    }

    #[test]
    fn binomial_substitution_alpha_two() {
        let c = ctx(6, 4);
        let f = phi(c, &["2"]);
        let t = tpoly(c, 1, &[(vec![1], 1)]);
        assert_eq!(f.apply(&t).unwrap(), tpoly(c, 1, &[(vec![1], 2), (vec![2], 1)]));
    }

    #[test]
    fn binomial_substitution_alpha_six() {
        let c = ctx(8, 6);
        let f = phi(c, &["6"]);
        let t = tpoly(c, 1, &[(vec![1], 1)]);
        let want = tpoly(
            c,
            1,
            &[(vec![1], 6), (vec![2], 15), (vec![3], 20), (vec![4], 15), (vec![5], 6), (vec![6], 1)],
        );
        assert_eq!(f.apply(&t).unwrap(), want);
    }

    #[test]
    fn action_is_a_ring_homomorphism() {
        let c = ctx(6, 5);
        let f = phi(c, &["2", "7"]);
        for coords in [Coords::T, Coords::X] {
            let a = MultiSeries::from_int_terms(
                c,
                2,
                coords,
                &[(vec![1, 0], 1), (vec![0, 2], -2), (vec![1, 1], 3)],
            )
            .unwrap();
            let b = MultiSeries::from_int_terms(c, 2, coords, &[(vec![0, 1], 4), (vec![2, 0], 1)])
                .unwrap();
            let lhs = f.apply(&a.mul(&b).unwrap()).unwrap();
            let rhs = f.apply(&a).unwrap().mul(&f.apply(&b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let lhs = f.apply(&a.add(&b).unwrap()).unwrap();
            let rhs = f.apply(&a).unwrap().add(&f.apply(&b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn coordinate_change_intertwines_the_two_descriptions() {
        let c = ctx(8, 5);
        let f = phi(c, &["2", "6"]);
        let a = tpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -3), (vec![1, 1], 2), (vec![0, 2], 1)]);
        let lhs = f.apply(&a).unwrap().change_coords(Coords::X).unwrap();
        let rhs = f.apply(&a.change_coords(Coords::X).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn root_of_unity_eigenvalues_are_rejected() {
        let c = ctx(6, 4);
        assert!(matches!(
            FrobeniusAction::from_strs(c, &["1"], 1, 1),
            Err(Error::SmallRootOfUnity { .. })
        ));
        assert!(matches!(
            FrobeniusAction::from_strs(c, &["-1"], 1, 1),
            Err(Error::SmallRootOfUnity { .. })
        ));
        assert!(matches!(
            FrobeniusAction::from_strs(c, &["5"], 1, 1),
            Err(Error::InvalidInput(_))
        ));
        assert!(FrobeniusAction::from_strs(c, &["2", "-2", "1/3"], 1, 1).is_ok());
    }

    #[test]
    fn trivialize_constant_units() {
        let c = ctx(8, 4);
        let f = phi(c, &["2", "3"]);
        let one = MultiSeries::one(c, 2, Coords::X);
        let t = trivialize_unit(&one, &f).unwrap();
        assert!(t.constant.congruent(&PadicScalar::one(c)));
        assert_eq!(t.cofactor, one);
        assert_eq!(t.loss, 0);
        let c0 = MultiSeries::constant(c, 2, Coords::X, PadicScalar::from_integer(c, 7));
        let t = trivialize_unit(&c0, &f).unwrap();
        assert!(t.constant.congruent(&PadicScalar::from_integer(c, 7)));
        assert_eq!(t.cofactor, one);
    }

    #[test]
    fn trivialize_recovers_the_cocycle_cofactor() {
        // u = f^phi / f for f = x1 (1 + x2) with alpha = (6, 6):
        // u = 6 (1 + 6 x2) / (1 + x2), c = 6, h = 1/(1 + x2).
        let c = ctx(8, 4);
        let f = phi(c, &["6", "6"]);
        let one_plus_x2 = xpoly(c, 2, &[(vec![0, 0], 1), (vec![0, 1], 1)]);
        let numer = xpoly(c, 2, &[(vec![0, 0], 6), (vec![0, 1], 36)]);
        let u = numer.mul(&one_plus_x2.invert().unwrap()).unwrap();
        let t = trivialize_unit(&u, &f).unwrap();
        assert!(t.constant.congruent(&PadicScalar::from_integer(c, 6)));
        assert_eq!(t.cofactor, one_plus_x2.invert().unwrap());
        // Re-verify the defining identity through the action.
        let lhs = u.mul(&f.apply(&t.cofactor).unwrap()).unwrap();
        let rhs = t.cofactor.scalar_mul(&t.constant).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn homogenize_monomial_and_shifted_generators() {
        let c = ctx(8, 4);
        let f2 = phi(c, &["2", "3"]);
        // Already homogeneous: g = x1 x2, c = alpha1 alpha2.
        let m = xpoly(c, 2, &[(vec![1, 1], 1)]);
        let r = homogenize_eigen(&m, &f2).unwrap();
        assert_eq!(r.degree, 2);
        assert_eq!(r.homogeneous, m);
        assert!(r.constant.congruent(&PadicScalar::from_integer(c, 6)));
        // f = x1 (1 + x2): g = x1, c = alpha1.
        let f = xpoly(c, 2, &[(vec![1, 0], 1), (vec![1, 1], 1)]);
        let r = homogenize_eigen(&f, &f2).unwrap();
        assert_eq!(r.degree, 1);
        assert_eq!(r.homogeneous, xpoly(c, 2, &[(vec![1, 0], 1)]));
        assert!(r.constant.congruent(&PadicScalar::from_integer(c, 2)));
        // Equal eigenvalues: f = (x1 - x2)(1 + x1): g = x1 - x2, c = alpha.
        let fe = phi(c, &["3", "3"]);
        let f = xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -1)])
            .mul(&xpoly(c, 2, &[(vec![0, 0], 1), (vec![1, 0], 1)]))
            .unwrap();
        let r = homogenize_eigen(&f, &fe).unwrap();
        assert_eq!(r.degree, 1);
        assert_eq!(r.homogeneous, xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -1)]));
        assert!(r.constant.congruent(&PadicScalar::from_integer(c, 3)));
    }

    #[test]
    fn homogenize_rejects_non_equivariant_generators() {
        let c = ctx(8, 4);
        let f2 = phi(c, &["2", "3"]);
        // (x1 + x2) is not stable under a non-scalar diagonal action.
        let f = xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], 1)]);
        assert!(matches!(homogenize_eigen(&f, &f2), Err(Error::NotEigenPrincipal)));
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(6, 4);
        let f = FrobeniusAction::from_strs(c, &["2", "-2", "1/3"], 3, 2).unwrap();
        let j = f.to_json();
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"alphas":["2","-2","1/3"],"weight":3,"power":2}"#
        );
        let back = FrobeniusAction::from_json(c, &j).unwrap();
        assert_eq!(back.to_json().alphas, j.alphas);
    }
}
