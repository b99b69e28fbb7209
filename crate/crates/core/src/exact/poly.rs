//! Multivariate polynomials with exact rational coefficients.
//!
//! This is the coefficient-exact fragment: elimination, membership, and the
//! homological computations all run here, where no precision questions arise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::Monomial;

/// Term order used by the Groebner machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermOrder {
    /// Graded reverse lexicographic.
    GrevLex,
    /// Block order eliminating the first `k` variables: compares degree in the
    /// block first, then grevlex overall.
    Elimination(usize),
}

impl TermOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
        match self {
            TermOrder::GrevLex => grevlex(a, b),
            TermOrder::Elimination(k) => {
                let da: u32 = a.0[..*k].iter().sum();
                let db: u32 = b.0[..*k].iter().sum();
                da.cmp(&db).then_with(|| grevlex(a, b))
            }
        }
    }
}

fn grevlex(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.0.iter().zip(&b.0).rev() {
        match x.cmp(y) {
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
            Ordering::Equal => {}
        }
    }
    std::cmp::Ordering::Equal
}

/// A sparse polynomial over the rationals. Terms are stored graded-lex for
/// canonical iteration; leading terms under other orders are found by scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl QPoly {
    pub fn zero(nvars: usize) -> Self {
        QPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(nvars), c);
        }
        p
    }

    pub fn from_integer(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), BigRational::one());
        p
    }

    pub fn monomial(nvars: usize, exp: Vec<u32>, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(exp), c);
        }
        p
    }

    pub fn from_int_terms(nvars: usize, terms: &[(Vec<u32>, i64)]) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(Monomial(e.clone()), BigRational::from_integer(BigInt::from(*c)));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut deg = None;
        for m in self.terms.keys() {
            match deg {
                None => deg = Some(m.degree()),
                Some(d) if d == m.degree() => {}
                _ => return false,
            }
        }
        true
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> QPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> QPoly {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            out.add_term(ma.mul(m), ca * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> QPoly {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn leading(&self, order: TermOrder) -> Option<(&Monomial, &BigRational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    pub fn monic(&self, order: TermOrder) -> QPoly {
        match self.leading(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Clears denominators and content; the sign makes the leading grevlex
    /// coefficient positive. Canonical integer-primitive representative.
    pub fn primitive(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        for c in self.terms.values() {
            denom_lcm = num_integer::lcm(denom_lcm, c.denom().clone());
        }
        let mut content = BigInt::zero();
        for c in self.terms.values() {
            let int = c.numer() * (&denom_lcm / c.denom());
            content = num_integer::gcd(content, int);
        }
        if content.is_zero() {
            return self.clone();
        }
        let scale = BigRational::new(denom_lcm, content);
        let scaled = self.scale(&scale);
        let lead_sign = scaled
            .leading(TermOrder::GrevLex)
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        if lead_sign {
            scaled.neg()
        } else {
            scaled
        }
    }

    /// Full composition `f(g_1, ..., g_n)`.
    pub fn substitute(&self, args: &[QPoly]) -> Result<QPoly> {
        if args.len() != self.nvars {
            return Err(Error::InvalidInput(format!(
                "substitute expects {} arguments, got {}",
                self.nvars,
                args.len()
            )));
        }
        let tn = args.first().map(|g| g.nvars).unwrap_or(0);
        let mut out = QPoly::zero(tn);
        for (m, c) in &self.terms {
            let mut prod = QPoly::constant(tn, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    prod = prod.mul(&args[i].pow(e));
                }
            }
            out = out.add(&prod);
        }
        Ok(out)
    }

    /// Sets variable `i` to zero.
    pub fn set_var_zero(&self, i: usize) -> QPoly {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Removes variable `i` from the index set; every term must be free of it.
    pub fn drop_var(&self, i: usize) -> Result<QPoly> {
        let mut out = Self::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            if m.0[i] != 0 {
                return Err(Error::InvalidInput(format!(
                    "polynomial still involves variable {}",
                    i + 1
                )));
            }
            let mut e = m.0.clone();
            e.remove(i);
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }
}

impl std::fmt::Display for QPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // Descending graded-lex for readability.
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Recursive-descent parser for the canonical polynomial strings: rational
/// constants, variables `x1..xn`, `+ - * ^` and parentheses.
pub fn parse_poly(input: &str, nvars: usize) -> Result<QPoly> {
    let mut p = Parser { chars: input.chars().collect(), pos: 0, nvars };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!(
            "trailing input at offset {} in {input:?}",
            p.pos
        )));
    }
    Ok(poly)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<QPoly> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                '-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<QPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                // Implicit multiplication before a variable or open paren.
                Some('x') | Some('(') => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<QPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| Error::Parse("exponent out of range".into()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<QPoly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('x') => {
                self.pos += 1;
                let idx = self.integer()?;
                if idx < 1 || idx as usize > self.nvars {
                    return Err(Error::Parse(format!(
                        "variable x{idx} out of range for {} variables",
                        self.nvars
                    )));
                }
                Ok(QPoly::variable(self.nvars, idx as usize - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den == 0 {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    Ok(QPoly::constant(
                        self.nvars,
                        BigRational::new(BigInt::from(num), BigInt::from(den)),
                    ))
                } else {
                    Ok(QPoly::from_integer(self.nvars, num))
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse("expected an integer".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
    }
}
