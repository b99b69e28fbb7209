//! Fixed-precision arithmetic in the coefficient field.
//!
//! A scalar is `u * l^v` with the unit part `u` retained modulo `l^N`, plus a
//! per-value count of digits forfeited by earlier operations. Equality and
//! "zero" are always relative to the attainable modulus `l^(N - loss)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared parameters under which every scalar and series is built: the odd
/// prime `l`, the number `N >= 1` of retained unit digits, and the total-degree
/// cutoff `D` used by the series layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Context {
    prime: u64,
    precision: u32,
    trunc_degree: u32,
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Context {
    /// The prime 2 is rejected: the convergence threshold for exp/log would
    /// collapse and nothing downstream needs it.
    pub fn new(prime: u64, precision: u32, trunc_degree: u32) -> Result<Self> {
        if prime < 3 || !is_prime_u64(prime) {
            return Err(Error::InvalidInput(format!(
                "prime must be an odd prime >= 3, got {prime}"
            )));
        }
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be >= 1".into()));
        }
        Ok(Context { prime, precision, trunc_degree })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn trunc_degree(&self) -> u32 {
        self.trunc_degree
    }

    /// The working modulus `l^N`.
    pub fn modulus(&self) -> BigUint {
        BigUint::from(self.prime).pow(self.precision)
    }

    fn check(&self, other: &Context) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// The attainable modulus `l^(N - loss)`.
    fn attainable(&self, loss: u32) -> BigUint {
        BigUint::from(self.prime).pow(self.precision - loss)
    }
}

/// Wire form of a [`Context`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextJson {
    pub prime: u64,
    pub precision: u32,
    pub degree: u32,
}

impl Context {
    pub fn to_json(&self) -> ContextJson {
        ContextJson { prime: self.prime, precision: self.precision, degree: self.trunc_degree }
    }

    pub fn from_json(j: &ContextJson) -> Result<Self> {
        Context::new(j.prime, j.precision, j.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Zero,
    /// `unit` is coprime to `l` and lies in `[1, l^N)`.
    Unit { val: i64, unit: BigUint, loss: u32 },
}

/// A fixed-precision element of the coefficient field: the value `unit * l^val`
/// known modulo `l^(val + N - loss)`.
///
/// Stored digits are canonical: the unit part is kept modulo the attainable
/// modulus `l^(N - loss)`, never modulo the full `l^N`, so two evaluation
/// orders of the same expression produce byte-identical values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicScalar {
    ctx: Context,
    repr: Repr,
}

impl PadicScalar {
    pub fn zero(ctx: Context) -> Self {
        PadicScalar { ctx, repr: Repr::Zero }
    }

    pub fn one(ctx: Context) -> Self {
        Self::from_integer(ctx, 1)
    }

    pub fn from_integer(ctx: Context, n: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(n))
    }

    pub fn from_bigint(ctx: Context, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(ctx);
        }
        let p = BigInt::from(ctx.prime);
        let mut mag = n.abs();
        let mut val: i64 = 0;
        while (&mag % &p).is_zero() {
            mag /= &p;
            val += 1;
        }
        let modulus = BigInt::from(ctx.modulus());
        let mut unit = if n.is_negative() { -mag } else { mag } % &modulus;
        if unit.is_negative() {
            unit += &modulus;
        }
        PadicScalar {
            ctx,
            repr: Repr::Unit { val, unit: unit.to_biguint().unwrap(), loss: 0 },
        }
    }

    /// Exact rational `num/den`; any rational is representable since the
    /// valuation may be negative.
    pub fn from_ratio(ctx: Context, num: &BigInt, den: &BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = Self::from_bigint(ctx, num);
        let d = Self::from_bigint(ctx, den);
        n.mul(&d.inv()?)
    }

    /// Parses `"a"` or `"a/b"` with optional sign.
    pub fn from_rational_str(ctx: Context, s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt =
            num.parse().map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
        let den: BigInt =
            den.parse().map_err(|_| Error::Parse(format!("bad rational denominator {den:?}")))?;
        Self::from_ratio(ctx, &num, &den)
    }

    /// Construct from raw parts; used by deserialization.
    pub fn from_parts(ctx: Context, val: i64, unit: BigUint, loss: u32) -> Result<Self> {
        if unit.is_zero() {
            return Ok(Self::zero(ctx));
        }
        if loss >= ctx.precision {
            return Err(Error::PrecisionExhausted { loss, precision: ctx.precision });
        }
        let unit = unit % ctx.attainable(loss);
        if unit.is_zero() || (&unit % ctx.prime).is_zero() {
            return Err(Error::InvalidInput(
                "unit digits must be nonzero and coprime to the prime".into(),
            ));
        }
        Ok(PadicScalar { ctx, repr: Repr::Unit { val, unit, loss } })
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Valuation; `None` encodes the zero marker `v = +infinity`.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    pub fn unit_digits(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Unit { unit, .. } => Some(unit),
        }
    }

    pub fn loss(&self) -> u32 {
        match &self.repr {
            Repr::Zero => 0,
            Repr::Unit { loss, .. } => *loss,
        }
    }

    /// True when the value is congruent to zero modulo the attainable modulus
    /// `l^(N - loss)` — the only honest notion of "zero" under finite precision.
    pub fn is_negligible(&self) -> bool {
        match &self.repr {
            Repr::Zero => true,
            Repr::Unit { val, loss, .. } => {
                *val >= (self.ctx.precision - *loss) as i64
            }
        }
    }

    /// Equality modulo the attainable modulus of the difference.
    pub fn congruent(&self, other: &PadicScalar) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_negligible(),
            Err(_) => false,
        }
    }

    pub fn add(&self, other: &PadicScalar) -> Result<PadicScalar> {
        self.ctx.check(&other.ctx)?;
        let (va, ua, la) = match &self.repr {
            Repr::Zero => return Ok(other.clone()),
            Repr::Unit { val, unit, loss } => (*val, unit, *loss),
        };
        let (vb, ub, lb) = match &other.repr {
            Repr::Zero => return Ok(self.clone()),
            Repr::Unit { val, unit, loss } => (*val, unit, *loss),
        };
        let n = self.ctx.precision as i64;
        let modulus = self.ctx.modulus();
        let p = BigUint::from(self.ctx.prime);
        let vmin = va.min(vb);
        // Trusted absolute moduli of the inputs.
        let m = (va + n - la as i64).min(vb + n - lb as i64);
        let shift = |v: i64| -> BigUint {
            let e = (v - vmin) as u32;
            if e >= self.ctx.precision {
                BigUint::zero()
            } else {
                p.pow(e)
            }
        };
        let s = (ua * shift(va) + ub * shift(vb)) % &modulus;
        if s.is_zero() {
            return Ok(Self::zero(self.ctx));
        }
        // Count cancelled digits and re-base the unit part.
        let mut c: i64 = 0;
        let mut u = s;
        while (&u % &p).is_zero() {
            u /= &p;
            c += 1;
        }
        let v = vmin + c;
        if v >= m {
            // Every remaining digit sits below the trust threshold.
            return Ok(Self::zero(self.ctx));
        }
        let loss = (v + n - m) as u32;
        u %= self.ctx.attainable(loss);
        debug_assert!(!u.is_zero());
        Ok(PadicScalar { ctx: self.ctx, repr: Repr::Unit { val: v, unit: u, loss } })
    }

    pub fn neg(&self) -> PadicScalar {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Unit { val, unit, loss } => PadicScalar {
                ctx: self.ctx,
                repr: Repr::Unit {
                    val: *val,
                    unit: self.ctx.attainable(*loss) - unit,
                    loss: *loss,
                },
            },
        }
    }

    pub fn sub(&self, other: &PadicScalar) -> Result<PadicScalar> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicScalar) -> Result<PadicScalar> {
        self.ctx.check(&other.ctx)?;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Ok(Self::zero(self.ctx)),
            (
                Repr::Unit { val: va, unit: ua, loss: la },
                Repr::Unit { val: vb, unit: ub, loss: lb },
            ) => {
                let loss = (*la).max(*lb);
                Ok(PadicScalar {
                    ctx: self.ctx,
                    repr: Repr::Unit {
                        val: va + vb,
                        unit: (ua * ub) % self.ctx.attainable(loss),
                        loss,
                    },
                })
            }
        }
    }

    pub fn inv(&self) -> Result<PadicScalar> {
        match &self.repr {
            Repr::Zero => Err(Error::DivisionByZero),
            Repr::Unit { val, unit, loss } => {
                if self.is_negligible() {
                    return Err(Error::DivisionByZero);
                }
                let m = BigInt::from(self.ctx.attainable(*loss));
                let u = BigInt::from(unit.clone());
                let g = u.extended_gcd(&m);
                debug_assert!(g.gcd.is_one());
                let mut inv = g.x % &m;
                if inv.is_negative() {
                    inv += &m;
                }
                Ok(PadicScalar {
                    ctx: self.ctx,
                    repr: Repr::Unit {
                        val: -val,
                        unit: inv.to_biguint().unwrap(),
                        loss: *loss,
                    },
                })
            }
        }
    }

    pub fn div(&self, other: &PadicScalar) -> Result<PadicScalar> {
        self.mul(&other.inv()?)
    }

    /// Integer power, negative exponents through the inverse.
    pub fn pow(&self, e: i64) -> Result<PadicScalar> {
        if e == 0 {
            return Ok(Self::one(self.ctx));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.ctx);
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            sq = sq.mul(&sq)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Adds `extra` forfeited digits; the channel used by graded solves that
    /// divide by non-unit eigenvalue differences.
    pub fn with_extra_loss(&self, extra: u32) -> Result<PadicScalar> {
        match &self.repr {
            Repr::Zero => Ok(self.clone()),
            Repr::Unit { val, unit, loss } => {
                let loss = loss + extra;
                if loss >= self.ctx.precision {
                    return Err(Error::PrecisionExhausted {
                        loss,
                        precision: self.ctx.precision,
                    });
                }
                Ok(PadicScalar {
                    ctx: self.ctx,
                    repr: Repr::Unit {
                        val: *val,
                        unit: unit % self.ctx.attainable(loss),
                        loss,
                    },
                })
            }
        }
    }

    /// `exp(a) = sum a^k / k!` for `v(a) >= 1`; the result is a principal unit.
    pub fn exp(&self) -> Result<PadicScalar> {
        let va = match self.valuation() {
            None => return Ok(Self::one(self.ctx)),
            Some(v) => v,
        };
        if va < 1 {
            return Err(Error::ConvergenceViolation(format!(
                "exp requires valuation >= 1, got {va}"
            )));
        }
        let n = self.ctx.precision as i64;
        let l = self.ctx.prime as i64;
        // For k beyond this bound every term has valuation >= N:
        // k*va - v(k!) >= k*(va - 1/(l-1)) >= N.
        let kmax = ((n * (l - 1)) / (va * (l - 1) - 1) + 2) as u64;
        let mut sum = Self::one(self.ctx);
        let mut power = Self::one(self.ctx);
        let mut fact_val: i64 = 0;
        let mut fact_unit = Self::one(self.ctx);
        for k in 1..=kmax {
            power = power.mul(self)?;
            let mut kk = k;
            while kk % self.ctx.prime as u64 == 0 {
                kk /= self.ctx.prime as u64;
                fact_val += 1;
            }
            fact_unit = fact_unit.mul(&Self::from_integer(self.ctx, kk as i64))?;
            if k as i64 * va - fact_val >= n {
                continue;
            }
            let term = power.mul(&fact_unit.inv()?)?;
            // Shift by the factorial valuation.
            let term = match term.repr {
                Repr::Zero => term,
                Repr::Unit { val, unit, loss } => PadicScalar {
                    ctx: self.ctx,
                    repr: Repr::Unit { val: val - fact_val, unit, loss },
                },
            };
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// `log(u) = sum (-1)^(k+1) (u-1)^k / k` for `u = 1 (mod l)`.
    pub fn log(&self) -> Result<PadicScalar> {
        let x = self.sub(&Self::one(self.ctx))?;
        let vx = match x.valuation() {
            None => return Ok(Self::zero(self.ctx)),
            Some(v) => v,
        };
        if self.valuation() != Some(0) || vx < 1 {
            return Err(Error::ConvergenceViolation(
                "log requires a principal unit (u = 1 mod l)".into(),
            ));
        }
        let n = self.ctx.precision as i64;
        let kmax = (n + 24) as u64;
        let mut sum = Self::zero(self.ctx);
        let mut power = Self::one(self.ctx);
        for k in 1..=kmax {
            power = power.mul(&x)?;
            let kval = {
                let mut kk = k;
                let mut v = 0i64;
                while kk % self.ctx.prime as u64 == 0 {
                    kk /= self.ctx.prime as u64;
                    v += 1;
                }
                v
            };
            if k as i64 * vx - kval >= n {
                continue;
            }
            let term = power.div(&Self::from_integer(self.ctx, k as i64))?;
            let term = if k % 2 == 0 { term.neg() } else { term };
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// The exact rational this scalar denotes when interpreted through the
    /// balanced lift of its unit digits. Requires loss-free digits.
    pub fn balanced_lift(&self) -> Result<(BigInt, i64)> {
        match &self.repr {
            Repr::Zero => Ok((BigInt::zero(), 0)),
            Repr::Unit { val, unit, loss } => {
                if *loss != 0 {
                    return Err(Error::ExactnessRequired);
                }
                let modulus = BigInt::from(self.ctx.modulus());
                let u = BigInt::from(unit.clone());
                let half = &modulus / 2;
                let lifted = if u > half { u - &modulus } else { u };
                Ok((lifted, *val))
            }
        }
    }
}

impl std::fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Unit { val, unit, loss } => {
                write!(f, "{unit}*{}^{val}", self.ctx.prime)?;
                if *loss > 0 {
                    write!(f, "(-{loss})")?;
                }
                Ok(())
            }
        }
    }
}

/// Wire form of a scalar: `{"v": int or "inf", "u": decimal digits, "loss": int}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarJson {
    pub v: serde_json::Value,
    pub u: String,
    pub loss: u32,
}

impl PadicScalar {
    pub fn to_json(&self) -> ScalarJson {
        match &self.repr {
            Repr::Zero => ScalarJson {
                v: serde_json::Value::String("inf".into()),
                u: "0".into(),
                loss: 0,
            },
            Repr::Unit { val, unit, loss } => ScalarJson {
                v: serde_json::Value::Number((*val).into()),
                u: unit.to_string(),
                loss: *loss,
            },
        }
    }

    pub fn from_json(ctx: Context, j: &ScalarJson) -> Result<Self> {
        if j.v.as_str() == Some("inf") {
            return Ok(Self::zero(ctx));
        }
        let val = j
            .v
            .as_i64()
            .ok_or_else(|| Error::Parse(format!("scalar valuation must be int or \"inf\", got {}", j.v)))?;
        let unit: BigUint = j
            .u
            .parse()
            .map_err(|_| Error::Parse(format!("bad unit digit string {:?}", j.u)))?;
        Self::from_parts(ctx, val, unit, j.loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(prime: u64, precision: u32) -> Context {
        Context::new(prime, precision, 8).unwrap()
    }

    fn int(c: Context, n: i64) -> PadicScalar {
        PadicScalar::from_integer(c, n)
    }

    #[test]
    fn rejects_two_and_composites() {
        assert!(Context::new(2, 4, 8).is_err());
        assert!(Context::new(9, 4, 8).is_err());
        assert!(Context::new(5, 0, 8).is_err());
        assert!(Context::new(5, 4, 0).is_ok());
    }

    #[test]
    fn mul_embeds_integers() {
        let c = ctx(5, 4);
        let prod = int(c, 2).mul(&int(c, 3)).unwrap();
        assert!(prod.congruent(&int(c, 6)));
    }

    #[test]
    fn inv_two_is_313_mod_625() {
        // Extended-Euclid oracle on Z/5^4: 2*313 = 626 = 1 mod 625.
        let c = ctx(5, 4);
        let i = int(c, 2).inv().unwrap();
        assert_eq!(i.unit_digits().unwrap(), &BigUint::from(313u32));
        assert_eq!(i.valuation(), Some(0));
    }

    #[test]
    fn neg_zero_is_zero() {
        let c = ctx(5, 4);
        assert!(PadicScalar::zero(c).neg().is_zero());
    }

    #[test]
    fn add_cancellation_raises_valuation_and_loss() {
        let c = ctx(5, 4);
        // 1 + (5^2 - 1): the sum 25 has two cancelled digits against precision 4.
        let a = int(c, 26);
        let b = int(c, -1);
        let s = a.add(&b).unwrap();
        assert_eq!(s.valuation(), Some(2));
        assert_eq!(s.loss(), 2);
        // Complete cancellation collapses to zero.
        assert!(int(c, 7).add(&int(c, -7)).unwrap().is_zero());
    }

    #[test]
    fn exp_at_five_matches_partial_sum_oracle() {
        // 1 + 5 + 25*inv(2) with 25*63 = 75 mod 125.
        let c = ctx(5, 3);
        let e = int(c, 5).exp().unwrap();
        assert!(e.congruent(&int(c, 81)));
    }

    #[test]
    fn exp_at_seven_matches_partial_sum_oracle() {
        // Terms k >= 2 have valuation >= 2.
        let c = ctx(7, 2);
        let e = int(c, 7).exp().unwrap();
        assert!(e.congruent(&int(c, 8)));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let c = ctx(5, 4);
        assert!(PadicScalar::zero(c).exp().unwrap().congruent(&int(c, 1)));
    }

    #[test]
    fn exp_rejects_unit_argument() {
        let c = ctx(5, 4);
        assert!(matches!(int(c, 2).exp(), Err(Error::ConvergenceViolation(_))));
    }

    #[test]
    fn log_of_six_matches_partial_sum_oracle() {
        // 5 - 25*inv(2) = 5 - 75 = -70 = 55 mod 125.
        let c = ctx(5, 3);
        let l = int(c, 6).log().unwrap();
        assert!(l.congruent(&int(c, 55)));
    }

    #[test]
    fn log_of_one_is_zero() {
        let c = ctx(5, 4);
        assert!(int(c, 1).log().unwrap().is_zero());
    }

    #[test]
    fn log_rejects_non_principal_unit() {
        let c = ctx(5, 4);
        assert!(matches!(int(c, 2).log(), Err(Error::ConvergenceViolation(_))));
        assert!(matches!(int(c, 5).log(), Err(Error::ConvergenceViolation(_))));
    }

    #[test]
    fn log_exp_composition_is_identity() {
        let c = ctx(5, 3);
        let five = int(c, 5);
        assert!(five.exp().unwrap().log().unwrap().congruent(&five));
        let c7 = ctx(7, 5);
        for k in [7, 14, 49] {
            let a = int(c7, k);
            assert!(a.exp().unwrap().log().unwrap().congruent(&a));
            let u = int(c7, 1).add(&int(c7, k)).unwrap();
            assert!(u.log().unwrap().exp().unwrap().congruent(&u));
        }
    }

    #[test]
    fn exp_is_additive_and_log_is_multiplicative() {
        let c = ctx(5, 6);
        let a = int(c, 10);
        let b = int(c, 15);
        let lhs = a.add(&b).unwrap().exp().unwrap();
        let rhs = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap();
        assert!(lhs.congruent(&rhs));
        let u = int(c, 6);
        let v = int(c, 11);
        let lhs = u.mul(&v).unwrap().log().unwrap();
        let rhs = u.log().unwrap().add(&v.log().unwrap()).unwrap();
        assert!(lhs.congruent(&rhs));
    }

    #[test]
    fn rational_parsing_and_balanced_lift() {
        let c = ctx(5, 4);
        let x = PadicScalar::from_rational_str(c, "-3").unwrap();
        assert_eq!(x.balanced_lift().unwrap(), (BigInt::from(-3), 0));
        let y = PadicScalar::from_rational_str(c, "7/2").unwrap();
        assert!(y.mul(&int(c, 2)).unwrap().congruent(&int(c, 7)));
        let z = PadicScalar::from_rational_str(c, "3/10").unwrap();
        assert_eq!(z.valuation(), Some(-1));
        assert!(PadicScalar::from_rational_str(c, "1/0").is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(5, 4);
        for s in [int(c, -75), PadicScalar::zero(c), int(c, 313).inv().unwrap()] {
            let j = s.to_json();
            let back = PadicScalar::from_json(c, &j).unwrap();
            assert_eq!(s, back);
        }
        let j = int(c, 50).to_json();
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"{"v":2,"u":"2","loss":0}"#);
    }

    #[test]
    fn context_mismatch_is_rejected() {
        let a = int(ctx(5, 4), 1);
        let b = int(ctx(7, 4), 1);
        assert!(matches!(a.add(&b), Err(Error::ContextMismatch)));
    }
}
