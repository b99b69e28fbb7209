//! Sparse truncated multivariate power series over a [`Context`].
//!
//! Terms are kept in a map ordered graded-lexicographically (total degree
//! first, then left-to-right exponent comparison), which fixes the iteration
//! and serialization order. Everything is truncated at the shared total-degree
//! cutoff `D`, i.e. arithmetic takes place in the honest quotient ring
//! `A / m^(D+1)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeff::{Context, PadicScalar, ScalarJson};
use crate::error::{Error, Result};

/// Exponent multi-index with graded-lex ordering, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise divisibility; `Some(quotient)` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut q = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            q.push(a - b);
        }
        Some(Monomial(q))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Which family of local parameters the variables denote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coords {
    T,
    X,
}

impl Coords {
    pub fn letter(&self) -> &'static str {
        match self {
            Coords::T => "t",
            Coords::X => "x",
        }
    }
}

/// A truncated multivariate power series. Stored coefficients are never
/// negligible; dropping a coefficient that is zero modulo its attainable
/// modulus is the only honest normalization under finite precision.
#[derive(Debug, Clone)]
pub struct MultiSeries {
    ctx: Context,
    nvars: usize,
    coords: Coords,
    terms: BTreeMap<Monomial, PadicScalar>,
}

impl MultiSeries {
    pub fn zero(ctx: Context, nvars: usize, coords: Coords) -> Self {
        MultiSeries { ctx, nvars, coords, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: Context, nvars: usize, coords: Coords, c: PadicScalar) -> Self {
        let mut s = Self::zero(ctx, nvars, coords);
        s.set_term(Monomial::unit(nvars), c);
        s
    }

    pub fn one(ctx: Context, nvars: usize, coords: Coords) -> Self {
        Self::constant(ctx, nvars, coords, PadicScalar::one(ctx))
    }

    pub fn variable(ctx: Context, nvars: usize, coords: Coords, i: usize) -> Self {
        let mut s = Self::zero(ctx, nvars, coords);
        s.set_term(Monomial::var(nvars, i), PadicScalar::one(ctx));
        s
    }

    /// Builds a series from integer-coefficient terms; exponents beyond the
    /// truncation degree are rejected.
    pub fn from_int_terms(
        ctx: Context,
        nvars: usize,
        coords: Coords,
        terms: &[(Vec<u32>, i64)],
    ) -> Result<Self> {
        let mut s = Self::zero(ctx, nvars, coords);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(Error::InvalidInput("exponent arity mismatch".into()));
            }
            let m = Monomial(exp.clone());
            if m.degree() > ctx.trunc_degree() {
                return Err(Error::InvalidInput(format!(
                    "term degree {} exceeds truncation {}",
                    m.degree(),
                    ctx.trunc_degree()
                )));
            }
            s.add_term(m, PadicScalar::from_integer(ctx, *c))?;
        }
        Ok(s)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coords(&self) -> Coords {
        self.coords
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &PadicScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> PadicScalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| PadicScalar::zero(self.ctx))
    }

    pub fn constant_term(&self) -> PadicScalar {
        self.coefficient(&Monomial::unit(self.nvars))
    }

    pub(crate) fn set_term(&mut self, m: Monomial, c: PadicScalar) {
        if !c.is_negligible() && m.degree() <= self.ctx.trunc_degree() {
            self.terms.insert(m, c);
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: PadicScalar) -> Result<()> {
        if c.is_negligible() || m.degree() > self.ctx.trunc_degree() {
            return Ok(());
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old.add(&c)?;
                if !s.is_negligible() {
                    self.terms.insert(m, s);
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_negligible())
    }

    /// Minimal total degree carrying a non-negligible coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_negligible())
            .map(|(m, _)| m.degree())
            .min()
    }

    /// Units are exactly the series of order zero.
    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_negligible()
    }

    fn check_compat(&self, other: &MultiSeries) -> Result<()> {
        if self.ctx != other.ctx || self.nvars != other.nvars {
            return Err(Error::ContextMismatch);
        }
        if self.coords != other.coords {
            return Err(Error::CoordinateMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiSeries {
        let mut out = Self::zero(self.ctx, self.nvars, self.coords);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &PadicScalar) -> Result<MultiSeries> {
        let mut out = Self::zero(self.ctx, self.nvars, self.coords);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check_compat(other)?;
        let d = self.ctx.trunc_degree();
        let mut out = Self::zero(self.ctx, self.nvars, self.coords);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > d {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > d {
                    // Terms iterate by ascending degree; nothing later fits.
                    break;
                }
                out.add_term(ma.mul(mb), ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<MultiSeries> {
        let mut acc = Self::one(self.ctx, self.nvars, self.coords);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Inverse of a unit, by the geometric series in `1 - f/f(0)`.
    pub fn invert(&self) -> Result<MultiSeries> {
        let c0 = self.constant_term();
        if c0.is_negligible() {
            return Err(Error::NotAUnit);
        }
        let c0_inv = c0.inv()?;
        let scaled = self.scalar_mul(&c0_inv)?;
        let g = Self::one(self.ctx, self.nvars, self.coords).sub(&scaled)?;
        let mut acc = Self::one(self.ctx, self.nvars, self.coords);
        let mut power = Self::one(self.ctx, self.nvars, self.coords);
        for _ in 1..=self.ctx.trunc_degree() {
            power = power.mul(&g)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.scalar_mul(&c0_inv)
    }

    /// Composition `f(g_1, ..., g_n)`, truncated at `D`. Each argument needs a
    /// zero constant term (scalar multiples of a variable are the special case
    /// already covered by that rule).
    pub fn substitute(&self, args: &[MultiSeries]) -> Result<MultiSeries> {
        if args.len() != self.nvars {
            return Err(Error::InvalidInput(format!(
                "substitute expects {} arguments, got {}",
                self.nvars,
                args.len()
            )));
        }
        let (tn, tc) = match args.first() {
            Some(g) => (g.nvars, g.coords),
            None => (0, self.coords),
        };
        for (i, g) in args.iter().enumerate() {
            if g.ctx != self.ctx || g.nvars != tn || g.coords != tc {
                return Err(Error::ContextMismatch);
            }
            if !g.constant_term().is_negligible() {
                return Err(Error::SubstitutionDiverges { index: i });
            }
        }
        let mut out = Self::zero(self.ctx, tn, tc);
        // Power cache per variable, grown on demand.
        let mut powers: Vec<Vec<MultiSeries>> = args
            .iter()
            .map(|g| vec![Self::one(self.ctx, tn, tc), g.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut prod = Self::constant(self.ctx, tn, tc, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&args[i])?;
                    powers[i].push(next);
                }
                prod = prod.mul(&powers[i][e as usize])?;
                if prod.is_zero() {
                    break;
                }
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// Exact division in the truncated ring: `Some(q)` with `self = q * divisor`
    /// when the divisor divides, `None` otherwise. Reduction eats the minimal
    /// graded-lex term at every step, so it terminates and is canonical.
    pub fn divide_exact(&self, divisor: &MultiSeries) -> Result<Option<MultiSeries>> {
        self.check_compat(divisor)?;
        let (lm, lc) = match divisor.terms.iter().find(|(_, c)| !c.is_negligible()) {
            None => return Err(Error::DivisionByZero),
            Some((m, c)) => (m.clone(), c.clone()),
        };
        let mut rem = self.clone();
        let mut quotient = Self::zero(self.ctx, self.nvars, self.coords);
        loop {
            let (mh, ch) = match rem.terms.iter().find(|(_, c)| !c.is_negligible()) {
                None => return Ok(Some(quotient)),
                Some((m, c)) => (m.clone(), c.clone()),
            };
            let qm = match mh.checked_div(&lm) {
                None => return Ok(None),
                Some(q) => q,
            };
            let factor = ch.div(&lc)?;
            quotient.add_term(qm.clone(), factor.clone())?;
            for (m, c) in &divisor.terms {
                rem.add_term(qm.mul(m), factor.mul(c)?.neg())?;
            }
            debug_assert!(rem.coefficient(&mh).is_negligible());
        }
    }

    /// Evaluation at scalar arguments with positive valuation.
    pub fn eval(&self, points: &[PadicScalar]) -> Result<PadicScalar> {
        if points.len() != self.nvars {
            return Err(Error::InvalidInput(format!(
                "eval expects {} points, got {}",
                self.nvars,
                points.len()
            )));
        }
        for p in points {
            if !p.is_zero() && p.valuation() < Some(1) {
                return Err(Error::ConvergenceViolation(
                    "evaluation point lies outside the open unit polydisk".into(),
                ));
            }
        }
        let mut acc = PadicScalar::zero(self.ctx);
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&points[i].pow(e as i64)?)?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// The series `exp(v) - 1` in the single variable with index `var`.
    pub fn exp_minus_one(ctx: Context, nvars: usize, coords: Coords, var: usize) -> Result<Self> {
        let mut s = Self::zero(ctx, nvars, coords);
        let mut fact = PadicScalar::one(ctx);
        for k in 1..=ctx.trunc_degree() {
            fact = fact.mul(&PadicScalar::from_integer(ctx, k as i64))?;
            let mut e = vec![0; nvars];
            e[var] = k;
            s.set_term(Monomial(e), fact.inv()?);
        }
        Ok(s)
    }

    /// The series `log(1 + v)` in the single variable with index `var`.
    pub fn log_one_plus(ctx: Context, nvars: usize, coords: Coords, var: usize) -> Result<Self> {
        let mut s = Self::zero(ctx, nvars, coords);
        for k in 1..=ctx.trunc_degree() {
            let c = PadicScalar::from_integer(ctx, k as i64).inv()?;
            let c = if k % 2 == 0 { c.neg() } else { c };
            let mut e = vec![0; nvars];
            e[var] = k;
            s.set_term(Monomial(e), c);
        }
        Ok(s)
    }

    /// Coordinate change `x_i = log(1 + t_i)`: substitutes `t_i = exp(x_i) - 1`
    /// (reading toward X) or `x_i = log(1 + t_i)` (toward T). The round trip is
    /// the identity to truncation.
    pub fn change_coords(&self, target: Coords) -> Result<MultiSeries> {
        if self.coords == target {
            return Err(Error::CoordinateMismatch);
        }
        let args: Result<Vec<MultiSeries>> = (0..self.nvars)
            .map(|i| match target {
                Coords::X => Self::exp_minus_one(self.ctx, self.nvars, Coords::X, i),
                Coords::T => Self::log_one_plus(self.ctx, self.nvars, Coords::T, i),
            })
            .collect();
        let mut relabeled = self.clone();
        relabeled.coords = target;
        relabeled.substitute(&args?)
    }

    /// Maps every coefficient through `f`, dropping results that become
    /// negligible. Monomial-indexed so callers can scale per-exponent.
    pub fn map_coefficients<F>(&self, mut f: F) -> Result<MultiSeries>
    where
        F: FnMut(&Monomial, &PadicScalar) -> Result<PadicScalar>,
    {
        let mut out = Self::zero(self.ctx, self.nvars, self.coords);
        for (m, c) in &self.terms {
            out.set_term(m.clone(), f(m, c)?);
        }
        Ok(out)
    }

    /// Restriction to the terms of one total degree.
    pub fn homogeneous_part(&self, degree: u32) -> MultiSeries {
        let mut out = Self::zero(self.ctx, self.nvars, self.coords);
        for (m, c) in &self.terms {
            if m.degree() == degree {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// True when all non-negligible terms share one total degree.
    pub fn is_homogeneous(&self) -> bool {
        let degrees: Vec<u32> = self
            .terms
            .iter()
            .filter(|(_, c)| !c.is_negligible())
            .map(|(m, _)| m.degree())
            .collect();
        degrees.windows(2).all(|w| w[0] == w[1])
    }

    /// Renames the variable letter without touching the terms; used for
    /// presentations in fresh variables.
    pub fn with_coords(&self, coords: Coords) -> MultiSeries {
        let mut out = self.clone();
        out.coords = coords;
        out
    }
}

/// Congruence modulo the attainable modulus, the only honest equality here.
impl PartialEq for MultiSeries {
    fn eq(&self, other: &Self) -> bool {
        if self.ctx != other.ctx || self.nvars != other.nvars || self.coords != other.coords {
            return false;
        }
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl std::fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}{}", self.coords.letter(), i + 1)?,
                    _ => write!(f, "*{}{}^{}", self.coords.letter(), i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// Wire form of one term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coeff: ScalarJson,
}

/// Wire form of a series; terms are sorted graded-lex ascending and the layout
/// is bit-exact for golden tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    pub coords: String,
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

impl MultiSeries {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            coords: self.coords.letter().to_string(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| !c.is_negligible())
                .map(|(m, c)| TermJson { exp: m.0.clone(), coeff: c.to_json() })
                .collect(),
        }
    }

    pub fn from_json(ctx: Context, j: &SeriesJson) -> Result<Self> {
        let coords = match j.coords.as_str() {
            "t" => Coords::T,
            "x" => Coords::X,
            other => return Err(Error::Parse(format!("coords must be \"t\" or \"x\", got {other:?}"))),
        };
        let mut s = Self::zero(ctx, j.nvars, coords);
        for t in &j.terms {
            if t.exp.len() != j.nvars {
                return Err(Error::Parse("term arity does not match nvars".into()));
            }
            let m = Monomial(t.exp.clone());
            if m.degree() > ctx.trunc_degree() {
                return Err(Error::Parse(format!(
                    "term degree {} exceeds truncation {}",
                    m.degree(),
                    ctx.trunc_degree()
                )));
            }
            s.add_term(m, PadicScalar::from_json(ctx, &t.coeff)?)?;
        }
        Ok(s)
    }
}
