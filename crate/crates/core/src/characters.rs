//! Closed points of the character variety at finite precision: tuples of
//! principal units, the values of a continuous character on the topological
//! generators. The open-polydisk coordinates are `t_i = chi(gamma_i) - 1`.

use serde::{Deserialize, Serialize};

use crate::coeff::{Context, PadicScalar, ScalarJson};
use crate::error::{Error, Result};
use crate::frobenius::FrobeniusAction;
use crate::linearize::IdealPresentation;
use crate::series::Coords;

/// A finite-precision character: one principal-unit value per generator.
/// Equality is componentwise to the working modulus.
#[derive(Debug, Clone)]
pub struct Character {
    ctx: Context,
    values: Vec<PadicScalar>,
}

impl Character {
    pub fn new(ctx: Context, values: Vec<PadicScalar>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            let dist = v.sub(&PadicScalar::one(ctx))?;
            if !dist.is_zero() && dist.valuation() < Some(1) {
                return Err(Error::ConvergenceViolation(format!(
                    "character value {} is not a principal unit",
                    i + 1
                )));
            }
        }
        Ok(Character { ctx, values })
    }

    pub fn trivial(ctx: Context, n: usize) -> Self {
        Character { ctx, values: vec![PadicScalar::one(ctx); n] }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn values(&self) -> &[PadicScalar] {
        &self.values
    }

    pub fn nvars(&self) -> usize {
        self.values.len()
    }

    pub fn mul(&self, other: &Character) -> Result<Character> {
        if self.ctx != other.ctx || self.values.len() != other.values.len() {
            return Err(Error::ContextMismatch);
        }
        let values: Result<Vec<PadicScalar>> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.mul(b))
            .collect();
        Ok(Character { ctx: self.ctx, values: values? })
    }

    pub fn inv(&self) -> Result<Character> {
        let values: Result<Vec<PadicScalar>> = self.values.iter().map(|v| v.inv()).collect();
        Ok(Character { ctx: self.ctx, values: values? })
    }

    /// Componentwise congruence to the working modulus.
    pub fn congruent(&self, other: &Character) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.congruent(b))
    }

    pub fn to_json(&self) -> CharacterJson {
        CharacterJson { values: self.values.iter().map(|v| v.to_json()).collect() }
    }

    pub fn from_json(ctx: Context, j: &CharacterJson) -> Result<Self> {
        let values: Result<Vec<PadicScalar>> = j
            .values
            .iter()
            .map(|v| PadicScalar::from_json(ctx, v))
            .collect();
        Self::new(ctx, values?)
    }
}

/// Wire form: `{"values": [scalar, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterJson {
    pub values: Vec<ScalarJson>,
}

/// Evaluates every generator of a T-coordinate ideal at the point
/// `t_i = chi(gamma_i) - 1`; an all-zero vector means the character lies in
/// the vanishing locus.
pub fn eval_ideal_at_char(
    ideal: &IdealPresentation,
    chi: &Character,
) -> Result<Vec<PadicScalar>> {
    if ideal.coords() != Coords::T {
        return Err(Error::CoordinateMismatch);
    }
    let ctx = *chi.context();
    let one = PadicScalar::one(ctx);
    let mut points = Vec::with_capacity(chi.nvars());
    for v in chi.values() {
        let t = v.sub(&one)?;
        if !t.is_zero() && t.valuation() < Some(1) {
            return Err(Error::ConvergenceViolation(
                "character lies outside the guaranteed polydisk".into(),
            ));
        }
        points.push(t);
    }
    ideal
        .generators()
        .iter()
        .map(|g| g.eval(&points))
        .collect()
}

/// The Frobenius action on characters through the log parameters:
/// `chi(gamma_i) -> exp(alpha_i^k * log chi(gamma_i))`.
pub fn frobenius_on_char(chi: &Character, phi: &FrobeniusAction) -> Result<Character> {
    if chi.nvars() != phi.nvars() || chi.context() != phi.context() {
        return Err(Error::ContextMismatch);
    }
    let values: Result<Vec<PadicScalar>> = chi
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.log()?.mul(&phi.effective_alpha(i)?)?.exp())
        .collect();
    Character::new(*chi.context(), values?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(5, 6, 6).unwrap()
    }

    fn scalar(c: Context, n: i64) -> PadicScalar {
        PadicScalar::from_integer(c, n)
    }

    #[test]
    fn group_axioms_to_modulus() {
        let c = ctx();
        let chi = Character::new(c, vec![scalar(c, 6), scalar(c, 11)]).unwrap();
        let one = Character::trivial(c, 2);
        assert!(one.mul(&chi).unwrap().congruent(&chi));
        assert!(chi.mul(&chi.inv().unwrap()).unwrap().congruent(&one));
        let psi = Character::new(c, vec![scalar(c, 26), scalar(c, 1)]).unwrap();
        let lhs = chi.mul(&psi).unwrap();
        let rhs = psi.mul(&chi).unwrap();
        assert!(lhs.congruent(&rhs));
    }

    #[test]
    fn non_principal_units_are_rejected() {
        let c = ctx();
        assert!(Character::new(c, vec![scalar(c, 2)]).is_err());
        assert!(Character::new(c, vec![scalar(c, 5)]).is_err());
        assert!(Character::new(c, vec![scalar(c, 1), scalar(c, 126)]).is_ok());
    }

    #[test]
    fn trivial_character_is_frobenius_fixed() {
        let c = ctx();
        let phi = FrobeniusAction::from_strs(c, &["2", "3"], 1, 1).unwrap();
        let one = Character::trivial(c, 2);
        let image = frobenius_on_char(&one, &phi).unwrap();
        assert!(image.congruent(&one));
    }

    #[test]
    fn frobenius_is_a_group_homomorphism_on_characters() {
        let c = ctx();
        let phi = FrobeniusAction::from_strs(c, &["2", "7"], 1, 1).unwrap();
        let chi = Character::new(c, vec![scalar(c, 6), scalar(c, 26)]).unwrap();
        let psi = Character::new(c, vec![scalar(c, 11), scalar(c, 1)]).unwrap();
        let lhs = frobenius_on_char(&chi.mul(&psi).unwrap(), &phi).unwrap();
        let rhs = frobenius_on_char(&chi, &phi)
            .unwrap()
            .mul(&frobenius_on_char(&psi, &phi).unwrap())
            .unwrap();
        assert!(lhs.congruent(&rhs));
    }

    #[test]
    fn power_field_composes() {
        let c = ctx();
        let phi1 = FrobeniusAction::from_strs(c, &["2", "3"], 1, 1).unwrap();
        let phi3 = FrobeniusAction::from_strs(c, &["2", "3"], 1, 3).unwrap();
        let chi = Character::new(c, vec![scalar(c, 6), scalar(c, 31)]).unwrap();
        let mut thrice = chi.clone();
        for _ in 0..3 {
            thrice = frobenius_on_char(&thrice, &phi1).unwrap();
        }
        let once = frobenius_on_char(&chi, &phi3).unwrap();
        assert!(once.congruent(&thrice));
    }
}
