//! Exact scalar coefficients: a rational times a power of `i` times a
//! monomial in the named physical constants.

use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = Rational64;

/// Named symbolic constants that may appear in coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Hbar,
    C,
    Charge,
    Mass,
    Theta,
    Eta,
    B,
    E1,
    E2,
    E3,
}

impl Constant {
    pub const ALL: [Constant; 10] = [
        Constant::Hbar,
        Constant::C,
        Constant::Charge,
        Constant::Mass,
        Constant::Theta,
        Constant::Eta,
        Constant::B,
        Constant::E1,
        Constant::E2,
        Constant::E3,
    ];

    fn index(self) -> usize {
        self as usize
    }

    /// Identifier used by the plain-text grammar.
    pub fn name(self) -> &'static str {
        match self {
            Constant::Hbar => "hbar",
            Constant::C => "c",
            Constant::Charge => "e",
            Constant::Mass => "m",
            Constant::Theta => "Theta",
            Constant::Eta => "eta",
            Constant::B => "B",
            Constant::E1 => "E1",
            Constant::E2 => "E2",
            Constant::E3 => "E3",
        }
    }

    pub fn latex(self) -> &'static str {
        match self {
            Constant::Hbar => r"\hbar",
            Constant::C => "c",
            Constant::Charge => "e",
            Constant::Mass => "m",
            Constant::Theta => r"\Theta",
            Constant::Eta => r"\eta",
            Constant::B => "B",
            Constant::E1 => "E_{1}",
            Constant::E2 => "E_{2}",
            Constant::E3 => "E_{3}",
        }
    }

    pub fn from_name(name: &str) -> Option<Constant> {
        Constant::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Electric-field component constant for axis 1..=3.
    pub fn electric(axis: u8) -> Constant {
        match axis {
            1 => Constant::E1,
            2 => Constant::E2,
            3 => Constant::E3,
            _ => panic!("axis {axis} out of range"),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Product of constants with integer exponents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial([i32; 10]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 10]);

    pub fn of(c: Constant) -> Self {
        Self::power(c, 1)
    }

    pub fn power(c: Constant, exp: i32) -> Self {
        let mut m = Self::ONE;
        m.0[c.index()] = exp;
        m
    }

    pub fn exponent(&self, c: Constant) -> i32 {
        self.0[c.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn contains(&self, c: Constant) -> bool {
        self.exponent(c) != 0
    }

    pub fn inverse(&self) -> Self {
        let mut m = *self;
        for e in &mut m.0 {
            *e = -*e;
        }
        m
    }

    /// Non-unit factors in canonical constant order.
    pub fn factors(&self) -> impl Iterator<Item = (Constant, i32)> + '_ {
        Constant::ALL
            .into_iter()
            .map(|c| (c, self.exponent(c)))
            .filter(|&(_, e)| e != 0)
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        let mut m = self;
        for (a, b) in m.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        m
    }
}

/// `rational * i^imaginary * consts`. Powers of `i` are folded into the
/// rational sign, so the stored power is 0 or 1 and zero is unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScalarCoeff {
    rational: Rational,
    i_pow: u8,
    consts: Monomial,
}

impl ScalarCoeff {
    pub fn new(rational: Rational, i_pow: u8, consts: Monomial) -> Self {
        let (mut rational, mut i_pow) = (rational, i_pow % 4);
        if i_pow >= 2 {
            rational = -rational;
            i_pow -= 2;
        }
        if rational.is_zero() {
            return Self::zero();
        }
        ScalarCoeff {
            rational,
            i_pow,
            consts,
        }
    }

    pub fn zero() -> Self {
        ScalarCoeff {
            rational: Rational::zero(),
            i_pow: 0,
            consts: Monomial::ONE,
        }
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn i() -> Self {
        Self::new(Rational::one(), 1, Monomial::ONE)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(Rational::new(num, den))
    }

    pub fn rational(r: Rational) -> Self {
        Self::new(r, 0, Monomial::ONE)
    }

    pub fn constant(c: Constant) -> Self {
        Self::new(Rational::one(), 0, Monomial::of(c))
    }

    pub fn constant_pow(c: Constant, exp: i32) -> Self {
        Self::new(Rational::one(), 0, Monomial::power(c, exp))
    }

    /// Product of several constants, e.g. `monomial(&[C, Charge])`.
    pub fn monomial(cs: &[Constant]) -> Self {
        cs.iter()
            .fold(Self::one(), |acc, &c| acc * Self::constant(c))
    }

    pub fn rational_part(&self) -> Rational {
        self.rational
    }

    pub fn i_pow(&self) -> u8 {
        self.i_pow
    }

    pub fn is_imaginary(&self) -> bool {
        self.i_pow == 1
    }

    pub fn consts(&self) -> Monomial {
        self.consts
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rational.is_one() && self.i_pow == 0 && self.consts.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.rational.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self::new(self.rational.abs(), self.i_pow, self.consts)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/i = -i
        let r = self.rational.recip();
        let r = if self.i_pow == 1 { -r } else { r };
        Some(Self::new(r, self.i_pow, self.consts.inverse()))
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inverse().map(|inv| *self * inv)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc * *self)
    }

    /// Complex value under the given bindings.
    pub fn evaluate(
        &self,
        lookup: impl Fn(Constant) -> Option<f64>,
    ) -> Result<Complex64, Constant> {
        let mut value = self.rational.to_f64().unwrap_or(f64::NAN);
        for (c, e) in self.consts.factors() {
            let v = lookup(c).ok_or(c)?;
            value *= v.powi(e);
        }
        Ok(if self.i_pow == 1 {
            Complex64::new(0.0, value)
        } else {
            Complex64::new(value, 0.0)
        })
    }
}

impl Default for ScalarCoeff {
    fn default() -> Self {
        Self::zero()
    }
}

impl Mul for ScalarCoeff {
    type Output = ScalarCoeff;
    fn mul(self, rhs: ScalarCoeff) -> ScalarCoeff {
        ScalarCoeff::new(
            self.rational * rhs.rational,
            self.i_pow + rhs.i_pow,
            self.consts * rhs.consts,
        )
    }
}

impl Neg for ScalarCoeff {
    type Output = ScalarCoeff;
    fn neg(self) -> ScalarCoeff {
        ScalarCoeff::new(-self.rational, self.i_pow, self.consts)
    }
}

impl From<i64> for ScalarCoeff {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl From<Constant> for ScalarCoeff {
    fn from(c: Constant) -> Self {
        Self::constant(c)
    }
}

impl fmt::Display for ScalarCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::operator_ir::render::render_coeff_plain(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_i_fold_into_sign() {
        let i = ScalarCoeff::i();
        assert_eq!(i * i, ScalarCoeff::integer(-1));
        assert_eq!(i * i * i, -ScalarCoeff::i());
        assert_eq!(i.pow(4), ScalarCoeff::one());
    }

    #[test]
    fn zero_is_unique() {
        let z = ScalarCoeff::new(Rational::zero(), 1, Monomial::of(Constant::Hbar));
        assert_eq!(z, ScalarCoeff::zero());
        assert_eq!(ScalarCoeff::constant(Constant::Theta) * ScalarCoeff::zero(), z);
    }

    #[test]
    fn inverse_of_i_hbar() {
        let ih = ScalarCoeff::i() * ScalarCoeff::constant(Constant::Hbar);
        let inv = ih.inverse().unwrap();
        assert_eq!(ih * inv, ScalarCoeff::one());
        assert_eq!(inv, -ScalarCoeff::i() * ScalarCoeff::constant_pow(Constant::Hbar, -1));
        assert!(ScalarCoeff::zero().inverse().is_none());
    }

    #[test]
    fn evaluation_uses_bindings() {
        let c = ScalarCoeff::ratio(1, 2) * ScalarCoeff::i() * ScalarCoeff::constant(Constant::B);
        let v = c.evaluate(|k| (k == Constant::B).then_some(4.0)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 2.0));
        assert_eq!(c.evaluate(|_| None), Err(Constant::B));
    }
}
