//! Linearization of equivariant prime ideals: from a proper nonzero prime
//! ideal stable under the diagonal action, produce the one-variable evaluation
//! map `x_i -> lambda_i * x` whose kernel contains it, with the eigenvalues on
//! the support aligned to a common power.
//!
//! The recursion runs entirely in the polynomial-exact fragment for three or
//! more variables: eliminate the leading variable, linearize the smaller
//! ideal, lift through the induced two-variable image, and compose. The
//! two-variable floor extracts a linear generator, through the
//! eigen-homogenization of a principal generator when necessary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::characters::Character;
use crate::coeff::{Context, PadicScalar, ScalarJson};
use crate::error::{Error, Result};
use crate::exact::{
    dimension, eliminate_first, groebner_basis, normal_form, QPoly, TermOrder,
};
use crate::frobenius::FrobeniusAction;
use crate::series::{Coords, Monomial, MultiSeries, SeriesJson};
use crate::weierstrass;

/// Which ring the presentation came from; metadata in the truncated model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingFlavor {
    Rn,
    An,
}

impl RingFlavor {
    fn tag(&self) -> &'static str {
        match self {
            RingFlavor::Rn => "Rn",
            RingFlavor::An => "An",
        }
    }
}

/// Generators of an ideal inside the maximal ideal, optionally carrying the
/// polynomial-exact flag (all coefficients loss-free, read through the
/// balanced lift) and a caller-asserted primality flag.
#[derive(Debug, Clone)]
pub struct IdealPresentation {
    flavor: RingFlavor,
    coords: Coords,
    nvars: usize,
    generators: Vec<MultiSeries>,
    exact: bool,
    primality_asserted: bool,
}

impl IdealPresentation {
    pub fn new(
        flavor: RingFlavor,
        generators: Vec<MultiSeries>,
        exact: bool,
        primality_asserted: bool,
    ) -> Result<Self> {
        let first = generators.first().ok_or_else(|| {
            Error::InvalidInput("an ideal presentation needs at least one generator".into())
        })?;
        let (coords, nvars, ctx) = (first.coords(), first.nvars(), *first.context());
        for g in &generators {
            if g.coords() != coords {
                return Err(Error::CoordinateMismatch);
            }
            if g.nvars() != nvars || *g.context() != ctx {
                return Err(Error::ContextMismatch);
            }
            if g.order() == Some(0) {
                return Err(Error::InvalidInput(
                    "generators must have positive order (the ideal sits inside m)".into(),
                ));
            }
        }
        Ok(IdealPresentation { flavor, coords, nvars, generators, exact, primality_asserted })
    }

    pub fn flavor(&self) -> RingFlavor {
        self.flavor
    }

    pub fn coords(&self) -> Coords {
        self.coords
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn context(&self) -> &Context {
        self.generators[0].context()
    }

    pub fn generators(&self) -> &[MultiSeries] {
        &self.generators
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn primality_asserted(&self) -> bool {
        self.primality_asserted
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.iter().all(|g| g.is_zero())
    }

    /// Converts generators to the same coordinate tag through the logarithmic
    /// change; exactness does not survive the transcendental substitution.
    pub fn change_coords(&self, target: Coords) -> Result<IdealPresentation> {
        let generators: Result<Vec<MultiSeries>> = self
            .generators
            .iter()
            .map(|g| g.change_coords(target))
            .collect();
        IdealPresentation::new(self.flavor, generators?, false, self.primality_asserted)
    }

    /// The exact rational polynomials the generators denote, through the
    /// balanced lift of loss-free coefficients.
    pub fn exact_generators(&self) -> Result<Vec<QPoly>> {
        if !self.exact {
            return Err(Error::ExactnessRequired);
        }
        self.generators.iter().map(series_to_qpoly).collect()
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson {
            flavor: self.flavor.tag().to_string(),
            coords: self.coords.letter().to_string(),
            exact: self.exact,
            generators: self.generators.iter().map(|g| g.to_json()).collect(),
        }
    }

    pub fn from_json(ctx: Context, j: &IdealJson) -> Result<Self> {
        let flavor = match j.flavor.as_str() {
            "Rn" => RingFlavor::Rn,
            "An" => RingFlavor::An,
            other => {
                return Err(Error::Parse(format!(
                    "flavor must be \"Rn\" or \"An\", got {other:?}"
                )))
            }
        };
        let generators: Result<Vec<MultiSeries>> = j
            .generators
            .iter()
            .map(|g| {
                let s = MultiSeries::from_json(ctx, g)?;
                if s.coords().letter() != j.coords {
                    return Err(Error::CoordinateMismatch);
                }
                Ok(s)
            })
            .collect();
        // Primality is not part of the wire format; loading asserts it, which
        // mirrors the hypothesis under which the algorithms run.
        IdealPresentation::new(flavor, generators?, j.exact, true)
    }
}

/// Wire form: `{"flavor", "coords", "exact", "generators"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealJson {
    pub flavor: String,
    pub coords: String,
    pub exact: bool,
    pub generators: Vec<SeriesJson>,
}

pub(crate) fn series_to_qpoly(s: &MultiSeries) -> Result<QPoly> {
    let mut out = QPoly::zero(s.nvars());
    let l = BigInt::from(s.context().prime());
    for (m, c) in s.terms() {
        if c.is_negligible() {
            continue;
        }
        let (unit, val) = c.balanced_lift()?;
        let coeff = if val >= 0 {
            BigRational::from_integer(unit * l.pow(val as u32))
        } else {
            BigRational::new(unit, l.pow((-val) as u32))
        };
        out.add_term(m.clone(), coeff);
    }
    Ok(out)
}

pub(crate) fn qpoly_to_series(
    p: &QPoly,
    ctx: Context,
    coords: Coords,
) -> Result<MultiSeries> {
    let mut out = MultiSeries::zero(ctx, p.nvars(), coords);
    for (m, c) in p.terms() {
        out.add_term(m.clone(), PadicScalar::from_ratio(ctx, c.numer(), c.denom())?)?;
    }
    Ok(out)
}

/// The specialization `x_i -> lambda_i * x`, normalized so the first nonzero
/// entry is one, together with the power aligning the eigenvalues on the
/// support and their common value.
#[derive(Debug, Clone)]
pub struct EvaluationMap {
    lambdas: Vec<PadicScalar>,
    lambdas_exact: Option<Vec<BigRational>>,
    aligned_power: u32,
    aligned_alpha: PadicScalar,
}

impl EvaluationMap {
    pub fn lambdas(&self) -> &[PadicScalar] {
        &self.lambdas
    }

    pub fn lambdas_exact(&self) -> Option<&[BigRational]> {
        self.lambdas_exact.as_deref()
    }

    pub fn aligned_power(&self) -> u32 {
        self.aligned_power
    }

    pub fn aligned_alpha(&self) -> &PadicScalar {
        &self.aligned_alpha
    }

    pub fn support(&self) -> Vec<usize> {
        self.lambdas
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_negligible())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_json(&self) -> EvaluationMapJson {
        EvaluationMapJson {
            lambdas: self.lambdas.iter().map(|l| l.to_json()).collect(),
            lambdas_exact: self
                .lambdas_exact
                .as_ref()
                .map(|v| v.iter().map(render_rational).collect()),
            aligned_power: self.aligned_power,
            aligned_alpha: self.aligned_alpha.to_json(),
        }
    }

    pub fn from_json(ctx: Context, j: &EvaluationMapJson) -> Result<Self> {
        let lambdas: Result<Vec<PadicScalar>> = j
            .lambdas
            .iter()
            .map(|l| PadicScalar::from_json(ctx, l))
            .collect();
        let lambdas_exact = match &j.lambdas_exact {
            None => None,
            Some(v) => {
                let parsed: Result<Vec<BigRational>> = v
                    .iter()
                    .map(|s| crate::frobenius::parse_rational(s))
                    .collect();
                Some(parsed?)
            }
        };
        Ok(EvaluationMap {
            lambdas: lambdas?,
            lambdas_exact,
            aligned_power: j.aligned_power,
            aligned_alpha: PadicScalar::from_json(ctx, &j.aligned_alpha)?,
        })
    }
}

fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Wire form of an evaluation map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationMapJson {
    pub lambdas: Vec<ScalarJson>,
    pub lambdas_exact: Option<Vec<String>>,
    pub aligned_power: u32,
    pub aligned_alpha: ScalarJson,
}

/// Membership of a series in the ideal: the exact Groebner normal form when
/// the presentation is polynomial-exact and the element lifts, the local
/// division when the ideal is principal.
pub fn membership(f: &MultiSeries, ideal: &IdealPresentation) -> Result<bool> {
    if f.coords() != ideal.coords() {
        return Err(Error::CoordinateMismatch);
    }
    if ideal.is_exact() {
        if let Ok(fq) = series_to_qpoly(f) {
            let gens = ideal.exact_generators()?;
            let gb = groebner_basis(&gens, TermOrder::GrevLex);
            return Ok(normal_form(&fq, &gb, TermOrder::GrevLex).is_zero());
        }
    }
    if ideal.generators().len() == 1 {
        return Ok(f.divide_exact(&ideal.generators()[0])?.is_some());
    }
    Err(Error::MembershipUndecidable)
}

/// Stability of the ideal under the diagonal action: every generator's image
/// reduces to zero modulo the ideal.
pub fn is_phi_stable(ideal: &IdealPresentation, phi: &FrobeniusAction) -> Result<bool> {
    if ideal.coords() == Coords::X && ideal.is_exact() {
        let gens = ideal.exact_generators()?;
        let gb = groebner_basis(&gens, TermOrder::GrevLex);
        for g in &gens {
            let image = phi.apply_exact(g);
            if !normal_form(&image, &gb, TermOrder::GrevLex).is_zero() {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if ideal.generators().len() == 1 {
        let f = &ideal.generators()[0];
        let image = phi.apply(f)?;
        return Ok(image.divide_exact(f)?.is_some());
    }
    Err(Error::MembershipUndecidable)
}

/// Maximum power budget for eigenvalue alignment.
pub const ALIGNMENT_BUDGET: u32 = 32;

/// The smallest `k <= 32` such that all `alpha_i^k` for `i` in the support
/// agree within the working modulus, together with the common value.
pub fn align_eigenvalues(
    phi: &FrobeniusAction,
    support: &[usize],
) -> Result<(u32, PadicScalar)> {
    if support.is_empty() {
        return Err(Error::InvalidInput("alignment needs a nonempty support".into()));
    }
    for k in 1..=ALIGNMENT_BUDGET {
        let first = phi.alpha(support[0]).pow((phi.power() * k) as i64)?;
        let mut all_equal = true;
        for &i in &support[1..] {
            let p = phi.alpha(i).pow((phi.power() * k) as i64)?;
            if !p.congruent(&first) {
                all_equal = false;
                break;
            }
        }
        if all_equal {
            return Ok((k, first));
        }
    }
    Err(Error::NoAlignment { budget: ALIGNMENT_BUDGET })
}

/// Every generator must vanish under `x_i -> lambda_i * x`, to truncation and
/// working modulus.
pub fn verify_evaluation(ideal: &IdealPresentation, map: &EvaluationMap) -> Result<bool> {
    if ideal.coords() != Coords::X {
        return Err(Error::CoordinateMismatch);
    }
    let ctx = *ideal.context();
    let x = MultiSeries::variable(ctx, 1, Coords::X, 0);
    let args: Result<Vec<MultiSeries>> =
        map.lambdas().iter().map(|l| x.scalar_mul(l)).collect();
    let args = args?;
    for g in ideal.generators() {
        if !g.substitute(&args)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The two-variable, height-one base case: eigen-homogenize the principal
/// generator; a prime input forces the homogeneous replacement to be linear,
/// and the linear form reads off the evaluation direction.
pub fn linearize_n2_dim1(f: &MultiSeries, phi: &FrobeniusAction) -> Result<EvaluationMap> {
    if f.nvars() != 2 {
        return Err(Error::InvalidInput("the base case takes two variables".into()));
    }
    let r = crate::frobenius::homogenize_eigen(f, phi)?;
    if r.degree != 1 {
        return Err(Error::NotLinearizable { degree: r.degree });
    }
    let ctx = *f.context();
    let a = r.homogeneous.coefficient(&Monomial(vec![1, 0]));
    let b = r.homogeneous.coefficient(&Monomial(vec![0, 1]));
    // Solve a*l1 + b*l2 = 0.
    let (l1, l2) = if a.is_negligible() {
        (PadicScalar::one(ctx), PadicScalar::zero(ctx))
    } else if b.is_negligible() {
        (PadicScalar::zero(ctx), PadicScalar::one(ctx))
    } else {
        (PadicScalar::one(ctx), a.div(&b)?.neg())
    };
    let exact = match (a.is_negligible(), b.is_negligible()) {
        (true, _) => Some(vec![BigRational::one(), BigRational::zero()]),
        (_, true) => Some(vec![BigRational::zero(), BigRational::one()]),
        _ => match (a.balanced_lift(), b.balanced_lift()) {
            (Ok((na, va)), Ok((nb, vb))) => {
                let l = BigInt::from(ctx.prime());
                let aq = scaled_rational(na, va, &l);
                let bq = scaled_rational(nb, vb, &l);
                Some(vec![BigRational::one(), -aq / bq])
            }
            _ => None,
        },
    };
    let map = finish_map(ctx, vec![l1, l2], exact, phi)?;
    let ideal = IdealPresentation::new(RingFlavor::An, vec![f.clone()], false, true)?;
    if !verify_evaluation(&ideal, &map)? {
        return Err(Error::NotLinearizable { degree: r.degree });
    }
    Ok(map)
}

fn scaled_rational(unit: BigInt, val: i64, l: &BigInt) -> BigRational {
    if val >= 0 {
        BigRational::from_integer(unit * l.pow(val as u32))
    } else {
        BigRational::new(unit, l.pow((-val) as u32))
    }
}

/// Elimination of one variable from a polynomial-exact presentation; the
/// returned presentation lives in one fewer variable.
pub fn eliminate(ideal: &IdealPresentation, drop_var: usize) -> Result<IdealPresentation> {
    let gens = ideal.exact_generators()?;
    if drop_var >= ideal.nvars() {
        return Err(Error::InvalidInput("variable index out of range".into()));
    }
    // Move the dropped variable to the front for the block order.
    let moved: Vec<QPoly> = gens.iter().map(|g| move_var_first(g, drop_var)).collect();
    let eliminated = eliminate_first(&moved, 1);
    let ctx = *ideal.context();
    let mut out_gens = Vec::new();
    for g in &eliminated {
        let dropped = g.drop_var(0)?.primitive();
        out_gens.push(qpoly_to_series(&dropped, ctx, ideal.coords())?);
    }
    if out_gens.is_empty() {
        out_gens.push(MultiSeries::zero(ctx, ideal.nvars() - 1, ideal.coords()));
    }
    IdealPresentation::new(ideal.flavor(), out_gens, true, ideal.primality_asserted())
        .or_else(|_| {
            // The zero ideal in fewer variables: keep a single zero generator.
            Ok(IdealPresentation {
                flavor: ideal.flavor(),
                coords: ideal.coords(),
                nvars: ideal.nvars() - 1,
                generators: vec![MultiSeries::zero(ctx, ideal.nvars() - 1, ideal.coords())],
                exact: true,
                primality_asserted: ideal.primality_asserted(),
            })
        })
}

fn move_var_first(g: &QPoly, var: usize) -> QPoly {
    let n = g.nvars();
    let mut out = QPoly::zero(n);
    for (m, c) in g.terms() {
        let mut e = Vec::with_capacity(n);
        e.push(m.0[var]);
        for (i, &x) in m.0.iter().enumerate() {
            if i != var {
                e.push(x);
            }
        }
        out.add_term(Monomial(e), c.clone());
    }
    out
}

/// Linearizes a proper nonzero prime equivariant ideal in logarithmic
/// coordinates. Two-variable principal presentations run through the
/// homogenization base case directly; everything else requires the
/// polynomial-exact fragment.
pub fn linearize_phi_ideal(
    ideal: &IdealPresentation,
    phi: &FrobeniusAction,
) -> Result<EvaluationMap> {
    if ideal.coords() != Coords::X {
        return Err(Error::CoordinateMismatch);
    }
    if ideal.nvars() != phi.nvars() {
        return Err(Error::ContextMismatch);
    }
    if ideal.is_zero_ideal() {
        return Err(Error::ZeroIdeal);
    }
    let ctx = *ideal.context();
    if !ideal.is_exact() {
        if ideal.nvars() == 2 && ideal.generators().len() == 1 {
            return linearize_n2_dim1(&ideal.generators()[0], phi);
        }
        return Err(Error::ExactnessRequired);
    }
    let gens = ideal.exact_generators()?;
    let alphas: Vec<BigRational> =
        (0..phi.nvars()).map(|i| phi.effective_alpha_exact(i)).collect();
    let lambdas_exact = linearize_exact(&gens, &alphas, ideal.nvars(), phi, true)?;
    let lambdas: Result<Vec<PadicScalar>> = lambdas_exact
        .iter()
        .map(|l| PadicScalar::from_ratio(ctx, l.numer(), l.denom()))
        .collect();
    let map = finish_map(ctx, lambdas?, Some(lambdas_exact), phi)?;
    if !verify_evaluation(ideal, &map)? {
        return Err(Error::NotLinearizable { degree: 0 });
    }
    Ok(map)
}

fn finish_map(
    ctx: Context,
    lambdas: Vec<PadicScalar>,
    lambdas_exact: Option<Vec<BigRational>>,
    phi: &FrobeniusAction,
) -> Result<EvaluationMap> {
    // Normalize: first nonzero entry becomes one.
    let pivot = lambdas
        .iter()
        .position(|l| !l.is_negligible())
        .ok_or(Error::ZeroIdeal)?;
    let inv = lambdas[pivot].inv()?;
    let lambdas: Result<Vec<PadicScalar>> = lambdas
        .iter()
        .map(|l| {
            if l.is_negligible() {
                Ok(PadicScalar::zero(ctx))
            } else {
                l.mul(&inv)
            }
        })
        .collect();
    let lambdas = lambdas?;
    let lambdas_exact = lambdas_exact.map(|v| {
        let p = v[pivot].clone();
        v.into_iter()
            .map(|l| if l.is_zero() { l } else { l / p.clone() })
            .collect::<Vec<BigRational>>()
    });
    let support: Vec<usize> = lambdas
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_negligible())
        .map(|(i, _)| i)
        .collect();
    let (aligned_power, aligned_alpha) = align_eigenvalues(phi, &support)?;
    Ok(EvaluationMap { lambdas, lambdas_exact, aligned_power, aligned_alpha })
}

/// The exact recursion. Returns unnormalized rational lambdas.
fn linearize_exact(
    gens: &[QPoly],
    alphas: &[BigRational],
    nvars: usize,
    phi: &FrobeniusAction,
    top_level: bool,
) -> Result<Vec<BigRational>> {
    let gb = groebner_basis(gens, TermOrder::GrevLex);
    if gb.is_empty() {
        // Zero ideal: contained in every kernel; pick the first axis.
        let mut lam = vec![BigRational::zero(); nvars];
        lam[0] = BigRational::one();
        return Ok(lam);
    }
    if gb.iter().any(|g| g.total_degree() == Some(0)) {
        return Err(Error::InvalidInput("unit ideal cannot arise inside m".into()));
    }
    let dim = dimension(&gb, nvars).expect("unit ideal excluded above");
    if dim == 0 {
        // A zero-dimensional prime inside m is m itself.
        return Err(Error::MaximalIdeal);
    }
    let _ = top_level;
    if dim > 1 {
        let x1 = QPoly::variable(nvars, 0);
        if normal_form(&x1, &gb, TermOrder::GrevLex).is_zero() {
            // The leading variable lies in the ideal: descend modulo it.
            let reduced: Vec<QPoly> = gb
                .iter()
                .map(|g| g.set_var_zero(0).drop_var(0))
                .collect::<Result<Vec<QPoly>>>()?;
            let lam_tail =
                linearize_exact(&reduced, &alphas[1..], nvars - 1, &phi.restrict_tail(1)?, false)?;
            let mut lam = vec![BigRational::zero()];
            lam.extend(lam_tail);
            return Ok(lam);
        }
        // Cut with the equivariant hyperplane and recurse on a component.
        let mut cut = gb.clone();
        cut.push(x1);
        let cut_gb = groebner_basis(&cut, TermOrder::GrevLex);
        let all_linear = cut_gb
            .iter()
            .all(|g| g.total_degree() == Some(1) && g.is_homogeneous());
        if !all_linear {
            // Minimal-prime selection beyond the linear fragment needs a
            // caller-supplied component.
            return Err(Error::ComponentOracleRequired);
        }
        return linearize_exact(&cut_gb, alphas, nvars, phi, false);
    }
    // dim == 1 from here on.
    if nvars == 1 {
        // Only the zero ideal has a one-dimensional quotient; handled above.
        return Err(Error::MaximalIdeal);
    }
    let in_trailing = gb.iter().all(|g| {
        g.terms()
            .all(|(m, _)| m.0[1..].iter().any(|&e| e > 0))
    });
    if in_trailing {
        // Contained in the trailing-variable prime of dimension one, hence
        // equal to it: the map keeps the leading variable only.
        let mut lam = vec![BigRational::zero(); nvars];
        lam[0] = BigRational::one();
        return Ok(lam);
    }
    if nvars == 2 {
        return base_case_two_vars(&gb, alphas, phi);
    }
    // A pure power of the leading variable appears in some basis element, so
    // that element is regular; prepare it to witness the finiteness step.
    let regular = gb
        .iter()
        .find(|g| {
            g.terms()
                .any(|(m, _)| m.0[0] > 0 && m.0[1..].iter().all(|&e| e == 0))
        })
        .ok_or(Error::NotRegular)?;
    let ctx = *phi.context();
    let regular_series = qpoly_to_series(regular, ctx, Coords::X)?;
    let _witness = weierstrass::prepare(&regular_series)?;
    // Eliminate the leading variable and linearize the smaller ideal.
    let eliminated = eliminate_first(&gb, 1);
    let tail_gens: Vec<QPoly> = eliminated
        .iter()
        .map(|g| g.drop_var(0))
        .collect::<Result<Vec<QPoly>>>()?;
    let lam_tail =
        linearize_exact(&tail_gens, &alphas[1..], nvars - 1, &phi.restrict_tail(1)?, false)?;
    // Lift: map x1 to itself and the trailing variables onto their line, then
    // solve the induced two-variable problem.
    let mut args = Vec::with_capacity(nvars);
    args.push(QPoly::variable(2, 0));
    for l in &lam_tail {
        args.push(QPoly::variable(2, 1).scale(l));
    }
    let image: Vec<QPoly> = gb
        .iter()
        .map(|g| g.substitute(&args))
        .collect::<Result<Vec<QPoly>>>()?;
    let image_gb = groebner_basis(&image, TermOrder::GrevLex);
    // The second slot carries the aligned eigenvalue of the tail support.
    let tail_support: Vec<usize> = lam_tail
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_zero())
        .map(|(i, _)| i + 1)
        .collect();
    if tail_support.is_empty() {
        return Err(Error::NotLinearizable { degree: 0 });
    }
    let pair_alphas = vec![alphas[0].clone(), alphas[tail_support[0]].clone()];
    let pair = base_case_two_vars(&image_gb, &pair_alphas, phi)?;
    let mut lam = vec![pair[0].clone()];
    for l in &lam_tail {
        lam.push(pair[1].clone() * l);
    }
    Ok(lam)
}

/// Two-variable floor of the recursion: find a linear form in the reduced
/// basis whose direction kills every generator; fall back to the principal
/// eigen-homogenization with a power-aligned pair action.
fn base_case_two_vars(
    gb: &[QPoly],
    alphas: &[BigRational],
    phi: &FrobeniusAction,
) -> Result<Vec<BigRational>> {
    for g in gb {
        if g.total_degree() == Some(1) && g.is_homogeneous() {
            let a = g.coefficient(&Monomial(vec![1, 0]));
            let b = g.coefficient(&Monomial(vec![0, 1]));
            let lam = if a.is_zero() {
                vec![BigRational::one(), BigRational::zero()]
            } else if b.is_zero() {
                vec![BigRational::zero(), BigRational::one()]
            } else {
                vec![BigRational::one(), -a / b]
            };
            let args = vec![
                QPoly::variable(1, 0).scale(&lam[0]),
                QPoly::variable(1, 0).scale(&lam[1]),
            ];
            let kills_all = gb
                .iter()
                .map(|h| h.substitute(&args))
                .collect::<Result<Vec<QPoly>>>()?
                .iter()
                .all(|h| h.is_zero());
            if kills_all {
                return Ok(lam);
            }
        }
    }
    // Principal fallback through the series layer, trying power replacements.
    if gb.len() == 1 {
        let ctx = *phi.context();
        let f = qpoly_to_series(&gb[0], ctx, Coords::X)?;
        for k in 1..=ALIGNMENT_BUDGET {
            let pair = FrobeniusAction::new(
                ctx,
                vec![alphas[0].clone(), alphas[1].clone()],
                phi.weight(),
                k,
            );
            let pair = match pair {
                Ok(p) => p,
                Err(_) => continue,
            };
            match linearize_n2_dim1(&f, &pair) {
                Ok(map) => {
                    let lam = map
                        .lambdas_exact()
                        .ok_or(Error::NotLinearizable { degree: 0 })?;
                    return Ok(lam.to_vec());
                }
                Err(Error::NotLinearizable { degree }) => {
                    return Err(Error::NotLinearizable { degree })
                }
                Err(_) => continue,
            }
        }
    }
    Err(Error::NotLinearizable { degree: 0 })
}

/// Characters along the recovered line: `chi_x(gamma_i) = exp(lambda_i * x)`.
/// Each sample needs `v(lambda_i * x) >= 1` on the support.
pub fn subgroup_points(map: &EvaluationMap, xs: &[PadicScalar]) -> Result<Vec<Character>> {
    xs.iter().map(|x| character_on_line(map, x)).collect()
}

/// The single character at parameter `x`.
pub fn character_on_line(map: &EvaluationMap, x: &PadicScalar) -> Result<Character> {
    let ctx = *x.context();
    let mut values = Vec::with_capacity(map.lambdas().len());
    for l in map.lambdas() {
        let arg = l.mul(x)?;
        if !arg.is_zero() && arg.valuation() < Some(1) {
            return Err(Error::ConvergenceViolation(
                "sample parameter leaves the convergence disk".into(),
            ));
        }
        values.push(arg.exp()?);
    }
    Character::new(ctx, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(5, 8, 6).unwrap()
    }

    fn xpoly(c: Context, nv: usize, terms: &[(Vec<u32>, i64)]) -> MultiSeries {
        MultiSeries::from_int_terms(c, nv, Coords::X, terms).unwrap()
    }

    fn ideal(gens: Vec<MultiSeries>) -> IdealPresentation {
        IdealPresentation::new(RingFlavor::An, gens, true, true).unwrap()
    }

    fn phi(c: Context, alphas: &[&str]) -> FrobeniusAction {
        FrobeniusAction::from_strs(c, alphas, 1, 1).unwrap()
    }

    #[test]
    fn membership_oracles() {
        let c = ctx();
        let i = ideal(vec![
            xpoly(c, 3, &[(vec![1, 0, 0], 1), (vec![0, 1, 0], -1)]),
            xpoly(c, 3, &[(vec![0, 1, 0], 1), (vec![0, 0, 1], -1)]),
        ]);
        let f = xpoly(c, 3, &[(vec![1, 0, 0], 1), (vec![0, 0, 1], -1)]);
        assert!(membership(&f, &i).unwrap());
        assert!(!membership(&xpoly(c, 3, &[(vec![1, 0, 0], 1)]), &i).unwrap());
        let principal = ideal(vec![xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -3)])]);
        assert!(membership(
            &xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -3)]),
            &principal
        )
        .unwrap());
    }

    #[test]
    fn phi_stability_oracles() {
        let c = ctx();
        let f = phi(c, &["2", "4"]);
        // (x1) is stable for any diagonal action.
        let i = ideal(vec![xpoly(c, 2, &[(vec![1, 0], 1)])]);
        assert!(is_phi_stable(&i, &f).unwrap());
        // (x1 + x2^2) with alpha1 = alpha2^2.
        let fsq = phi(c, &["4", "2"]);
        let i = ideal(vec![xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 2], 1)])]);
        assert!(is_phi_stable(&i, &fsq).unwrap());
        // (x1 + x2) with distinct eigenvalues is not stable.
        let i = ideal(vec![xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], 1)])]);
        assert!(!is_phi_stable(&i, &f).unwrap());
    }

    #[test]
    fn alignment_search() {
        let c = ctx();
        let f = phi(c, &["2", "2", "3"]);
        let (k, a) = align_eigenvalues(&f, &[0, 1]).unwrap();
        assert_eq!(k, 1);
        assert!(a.congruent(&PadicScalar::from_integer(c, 2)));
        let f = phi(c, &["2", "-2"]);
        let (k, a) = align_eigenvalues(&f, &[0, 1]).unwrap();
        assert_eq!(k, 2);
        assert!(a.congruent(&PadicScalar::from_integer(c, 4)));
        let f = phi(c, &["2", "3"]);
        assert!(matches!(
            align_eigenvalues(&f, &[0, 1]),
            Err(Error::NoAlignment { .. })
        ));
    }

    #[test]
    fn base_case_coordinate_ideal() {
        let c = ctx();
        let f = phi(c, &["2", "3"]);
        let map = linearize_n2_dim1(&xpoly(c, 2, &[(vec![0, 1], 1)]), &f).unwrap();
        assert!(map.lambdas()[0].congruent(&PadicScalar::one(c)));
        assert!(map.lambdas()[1].is_zero());
    }

    #[test]
    fn base_case_linear_form() {
        let c = ctx();
        let f = phi(c, &["2", "2"]);
        // f = x1 - 3 x2: lambda = (1, 1/3).
        let map = linearize_n2_dim1(&xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -3)]), &f)
            .unwrap();
        assert!(map.lambdas()[0].congruent(&PadicScalar::one(c)));
        assert!(map.lambdas()[1]
            .congruent(&PadicScalar::from_integer(c, 3).inv().unwrap()));
        assert_eq!(
            map.lambdas_exact().unwrap()[1],
            BigRational::new(BigInt::from(1), BigInt::from(3))
        );
    }

    #[test]
    fn base_case_with_unit_cofactor() {
        let c = ctx();
        let f = phi(c, &["2", "2"]);
        // (x1 - x2)(1 + x1): lambda = (1, 1).
        let gen = xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -1)])
            .mul(&xpoly(c, 2, &[(vec![0, 0], 1), (vec![1, 0], 1)]))
            .unwrap();
        let map = linearize_n2_dim1(&gen, &f).unwrap();
        assert!(map.lambdas()[0].congruent(&PadicScalar::one(c)));
        assert!(map.lambdas()[1].congruent(&PadicScalar::one(c)));
    }

    #[test]
    fn base_case_rejects_higher_degree() {
        let c = ctx();
        let f = phi(c, &["2", "2"]);
        let gen = xpoly(c, 2, &[(vec![2, 0], 1), (vec![0, 2], -1)]);
        assert!(matches!(
            linearize_n2_dim1(&gen, &f),
            Err(Error::NotLinearizable { degree: 2 })
        ));
    }

    #[test]
    fn eliminate_matches_groebner_oracles() {
        let c = ctx();
        let i = ideal(vec![
            xpoly(c, 3, &[(vec![1, 0, 0], 1), (vec![0, 1, 0], -1)]),
            xpoly(c, 3, &[(vec![0, 1, 0], 1), (vec![0, 0, 1], -1)]),
        ]);
        let j = eliminate(&i, 0).unwrap();
        assert_eq!(j.nvars(), 2);
        assert_eq!(j.generators().len(), 1);
        assert_eq!(j.generators()[0], xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -1)]));
        // x1 absent: unchanged.
        let i = ideal(vec![xpoly(c, 3, &[(vec![0, 1, 0], 1), (vec![0, 0, 1], -1)])]);
        let j = eliminate(&i, 0).unwrap();
        assert_eq!(j.generators()[0], xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 1], -1)]));
        // (x1 - x2^2) eliminates to zero.
        let i = ideal(vec![xpoly(c, 2, &[(vec![1, 0], 1), (vec![0, 2], -1)])]);
        let j = eliminate(&i, 0).unwrap();
        assert!(j.is_zero_ideal());
    }

    #[test]
    fn maximal_ideal_is_rejected() {
        let c = ctx();
        let f = phi(c, &["2", "2"]);
        let i = ideal(vec![
            xpoly(c, 2, &[(vec![1, 0], 1)]),
            xpoly(c, 2, &[(vec![0, 1], 1)]),
        ]);
        assert!(matches!(linearize_phi_ideal(&i, &f), Err(Error::MaximalIdeal)));
    }

    #[test]
    fn delegates_to_base_case() {
        let c = ctx();
        let f = phi(c, &["2", "3"]);
        let i = ideal(vec![xpoly(c, 2, &[(vec![0, 1], 1)])]);
        let map = linearize_phi_ideal(&i, &f).unwrap();
        assert!(map.lambdas()[0].congruent(&PadicScalar::one(c)));
        assert!(map.lambdas()[1].is_zero());
        assert!(verify_evaluation(&i, &map).unwrap());
    }

    #[test]
    fn recovers_three_variable_kernel() {
        let c = ctx();
        let f = phi(c, &["2", "2", "2"]);
        // Kernel of x_i -> lambda_i x with lambda = (1, 2, 3).
        let i = ideal(vec![
            xpoly(c, 3, &[(vec![1, 0, 0], 2), (vec![0, 1, 0], -1)]),
            xpoly(c, 3, &[(vec![1, 0, 0], 3), (vec![0, 0, 1], -1)]),
        ]);
        let map = linearize_phi_ideal(&i, &f).unwrap();
        assert!(verify_evaluation(&i, &map).unwrap());
        let lam = map.lambdas_exact().unwrap();
        assert_eq!(lam[0], BigRational::one());
        assert_eq!(lam[1], BigRational::from_integer(BigInt::from(2)));
        assert_eq!(lam[2], BigRational::from_integer(BigInt::from(3)));
    }

    #[test]
    fn characters_on_the_recovered_line() {
        let c = Context::new(5, 3, 6).unwrap();
        let f = phi(c, &["2"]);
        let map = EvaluationMap {
            lambdas: vec![PadicScalar::one(c), PadicScalar::zero(c)],
            lambdas_exact: Some(vec![BigRational::one(), BigRational::zero()]),
            aligned_power: 1,
            aligned_alpha: PadicScalar::from_integer(c, 2),
        };
        let _ = f;
        let x = PadicScalar::from_integer(c, 5);
        let chi = character_on_line(&map, &x).unwrap();
        // exp(5) = 81 mod 125 on the support, exp(0) = 1 off it.
        assert!(chi.values()[0].congruent(&PadicScalar::from_integer(c, 81)));
        assert!(chi.values()[1].congruent(&PadicScalar::one(c)));
        // Group law along the line.
        let y = PadicScalar::from_integer(c, 10);
        let lhs = character_on_line(&map, &x.add(&y).unwrap()).unwrap();
        let rhs = chi.mul(&character_on_line(&map, &y).unwrap()).unwrap();
        assert!(lhs.congruent(&rhs));
        // Outside the disk.
        assert!(character_on_line(&map, &PadicScalar::one(c)).is_err());
    }
}
