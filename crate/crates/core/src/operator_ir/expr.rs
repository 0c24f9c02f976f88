use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_traits::Zero;

use super::atom::Atom;
use super::scalar::{Constant, Monomial, Rational, ScalarCoeff};

/// A single product term: coefficient times an ordered factor sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: ScalarCoeff,
    pub factors: Vec<Atom>,
}

impl Term {
    pub fn new(coeff: ScalarCoeff, factors: Vec<Atom>) -> Self {
        Term { coeff, factors }
    }
}

/// Everything about a term except its rational part; terms with equal keys
/// merge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TermKey {
    factors: Vec<Atom>,
    consts: Monomial,
    imaginary: bool,
}

/// Sum of terms with exact coefficients. Like terms are always merged and
/// zero terms dropped; factor order is whatever the producer left, and is
/// canonical only after [`canonicalize`](super::canonicalize).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OperatorExpr {
    terms: BTreeMap<TermKey, Rational>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(ScalarCoeff::one())
    }

    pub fn scalar(c: ScalarCoeff) -> Self {
        Self::term(c, Vec::new())
    }

    pub fn constant(c: Constant) -> Self {
        Self::scalar(ScalarCoeff::constant(c))
    }

    pub fn atom(a: Atom) -> Self {
        Self::term(ScalarCoeff::one(), vec![a])
    }

    pub fn term(c: ScalarCoeff, factors: Vec<Atom>) -> Self {
        let mut e = Self::zero();
        e.add_term(c, factors);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut e = Self::zero();
        for t in terms {
            e.add_term(t.coeff, t.factors);
        }
        e
    }

    pub fn add_term(&mut self, c: ScalarCoeff, factors: Vec<Atom>) {
        if c.is_zero() {
            return;
        }
        let key = TermKey {
            factors,
            consts: c.consts(),
            imaginary: c.is_imaginary(),
        };
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c.rational_part());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c.rational_part();
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(k, r)| Term {
            coeff: ScalarCoeff::new(*r, k.imaginary as u8, k.consts),
            factors: k.factors.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no term carries an operator factor.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|k| k.factors.is_empty())
    }

    /// The single coefficient of a one-term scalar expression (or zero).
    pub fn as_scalar(&self) -> Option<ScalarCoeff> {
        match self.len() {
            0 => Some(ScalarCoeff::zero()),
            1 => {
                let t = self.terms().next()?;
                t.factors.is_empty().then_some(t.coeff)
            }
            _ => None,
        }
    }

    /// Coefficient of the term with exactly this factor sequence and the
    /// constant/imaginary signature of `like`.
    pub fn coefficient_of(&self, factors: &[Atom], consts: Monomial, imaginary: bool) -> ScalarCoeff {
        let key = TermKey {
            factors: factors.to_vec(),
            consts,
            imaginary,
        };
        self.terms
            .get(&key)
            .map(|r| ScalarCoeff::new(*r, imaginary as u8, consts))
            .unwrap_or_default()
    }

    pub fn scale(&self, c: ScalarCoeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms().map(|t| Term::new(t.coeff * c, t.factors)))
    }

    /// Keep only terms satisfying the predicate.
    pub fn filter(&self, mut keep: impl FnMut(&Term) -> bool) -> Self {
        Self::from_terms(self.terms().filter(|t| keep(t)))
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.terms.keys().flat_map(|k| k.factors.iter().copied())
    }

    pub fn contains_atom(&self, pred: impl Fn(Atom) -> bool) -> bool {
        self.atoms().any(pred)
    }

    /// True when any coefficient carries the given constant.
    pub fn mentions(&self, c: Constant) -> bool {
        self.terms.keys().any(|k| k.consts.contains(c))
    }

    /// Replace every atom by an expression, multiplying out in order.
    pub fn substitute(&self, mut image: impl FnMut(Atom) -> Option<OperatorExpr>) -> Self {
        let mut out = Self::zero();
        for t in self.terms() {
            let mut acc = OperatorExpr::scalar(t.coeff);
            for a in t.factors {
                let img = image(a).unwrap_or_else(|| OperatorExpr::atom(a));
                acc = &acc * &img;
                if acc.is_zero() {
                    break;
                }
            }
            out += acc;
        }
        out
    }

    /// The exact scalar `λ` with `self = λ·other`, if there is one. `None`
    /// when `other` is zero or the two are not proportional.
    pub fn ratio_to(&self, other: &OperatorExpr) -> Option<ScalarCoeff> {
        let first = other.terms().next()?;
        // λ maps the first term of `other` onto some term of self with the
        // same factor sequence
        self.terms
            .iter()
            .filter(|(k, _)| k.factors == first.factors)
            .filter_map(|(k, r)| ScalarCoeff::new(*r, k.imaginary as u8, k.consts).div(&first.coeff))
            .find(|&lambda| other.scale(lambda) == *self)
    }

    /// Drop every term whose coefficient carries `c` with positive power.
    pub fn set_to_zero(&self, c: Constant) -> Self {
        self.filter(|t| t.coeff.consts().exponent(c) <= 0)
    }
}

impl From<Atom> for OperatorExpr {
    fn from(a: Atom) -> Self {
        OperatorExpr::atom(a)
    }
}

impl From<ScalarCoeff> for OperatorExpr {
    fn from(c: ScalarCoeff) -> Self {
        OperatorExpr::scalar(c)
    }
}

impl AddAssign for OperatorExpr {
    fn add_assign(&mut self, rhs: OperatorExpr) {
        for t in rhs.terms() {
            self.add_term(t.coeff, t.factors);
        }
    }
}

impl AddAssign<&OperatorExpr> for OperatorExpr {
    fn add_assign(&mut self, rhs: &OperatorExpr) {
        for t in rhs.terms() {
            self.add_term(t.coeff, t.factors);
        }
    }
}

impl Add for &OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for OperatorExpr {
    type Output = OperatorExpr;
    fn add(mut self, rhs: OperatorExpr) -> OperatorExpr {
        self += rhs;
        self
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        self.scale(-ScalarCoeff::one())
    }
}

impl Neg for OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        -&self
    }
}

impl Sub for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: &OperatorExpr) -> OperatorExpr {
        self + &(-rhs)
    }
}

impl Sub for OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: OperatorExpr) -> OperatorExpr {
        &self - &rhs
    }
}

/// Ordered (non-commutative) product: factor sequences are concatenated.
impl Mul for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut out = OperatorExpr::zero();
        for a in self.terms() {
            for b in rhs.terms() {
                let mut factors = a.factors.clone();
                factors.extend_from_slice(&b.factors);
                out.add_term(a.coeff * b.coeff, factors);
            }
        }
        out
    }
}

impl Mul for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: OperatorExpr) -> OperatorExpr {
        &self * &rhs
    }
}

impl Mul<ScalarCoeff> for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: ScalarCoeff) -> OperatorExpr {
        self.scale(rhs)
    }
}

impl Mul<ScalarCoeff> for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: ScalarCoeff) -> OperatorExpr {
        self.scale(rhs)
    }
}

/// Cartesian triple of operator expressions (axis 1 at index 0).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vec3Expr(pub [OperatorExpr; 3]);

impl Vec3Expr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_fn(mut f: impl FnMut(u8) -> OperatorExpr) -> Self {
        Vec3Expr([f(1), f(2), f(3)])
    }

    pub fn try_from_fn<E>(mut f: impl FnMut(u8) -> Result<OperatorExpr, E>) -> Result<Self, E> {
        Ok(Vec3Expr([f(1)?, f(2)?, f(3)?]))
    }

    /// Component for 1-based axis.
    pub fn axis(&self, axis: u8) -> &OperatorExpr {
        &self.0[axis as usize - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &OperatorExpr> {
        self.0.iter()
    }

    pub fn map(&self, mut f: impl FnMut(&OperatorExpr) -> OperatorExpr) -> Self {
        Vec3Expr([f(&self.0[0]), f(&self.0[1]), f(&self.0[2])])
    }

    pub fn try_map<E>(
        &self,
        mut f: impl FnMut(&OperatorExpr) -> Result<OperatorExpr, E>,
    ) -> Result<Self, E> {
        Ok(Vec3Expr([f(&self.0[0])?, f(&self.0[1])?, f(&self.0[2])?]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(OperatorExpr::is_zero)
    }

    pub fn scale(&self, c: ScalarCoeff) -> Self {
        self.map(|e| e.scale(c))
    }

    /// Componentwise `self × rhs` using the ordered product.
    pub fn cross(&self, rhs: &Vec3Expr) -> Self {
        let [a1, a2, a3] = &self.0;
        let [b1, b2, b3] = &rhs.0;
        Vec3Expr([
            &(a2 * b3) - &(a3 * b2),
            &(a3 * b1) - &(a1 * b3),
            &(a1 * b2) - &(a2 * b1),
        ])
    }

    /// Ordered dot product `Σ self_i rhs_i`.
    pub fn dot(&self, rhs: &Vec3Expr) -> OperatorExpr {
        self.0
            .iter()
            .zip(&rhs.0)
            .fold(OperatorExpr::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn set_to_zero(&self, c: Constant) -> Self {
        self.map(|e| e.set_to_zero(c))
    }
}

impl Index<usize> for Vec3Expr {
    type Output = OperatorExpr;
    fn index(&self, i: usize) -> &OperatorExpr {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec3Expr {
    fn index_mut(&mut self, i: usize) -> &mut OperatorExpr {
        &mut self.0[i]
    }
}

impl Add for &Vec3Expr {
    type Output = Vec3Expr;
    fn add(self, rhs: &Vec3Expr) -> Vec3Expr {
        Vec3Expr([&self.0[0] + &rhs.0[0], &self.0[1] + &rhs.0[1], &self.0[2] + &rhs.0[2]])
    }
}

impl Sub for &Vec3Expr {
    type Output = Vec3Expr;
    fn sub(self, rhs: &Vec3Expr) -> Vec3Expr {
        Vec3Expr([&self.0[0] - &rhs.0[0], &self.0[1] - &rhs.0[1], &self.0[2] - &rhs.0[2]])
    }
}

/// Vector of Dirac alpha matrices.
pub fn alpha_vec() -> Vec3Expr {
    Vec3Expr::from_fn(|i| OperatorExpr::atom(Atom::Alpha(i)))
}

pub fn position_vec() -> Vec3Expr {
    Vec3Expr::from_fn(|i| OperatorExpr::atom(Atom::Position(i)))
}

pub fn momentum_vec() -> Vec3Expr {
    Vec3Expr::from_fn(|i| OperatorExpr::atom(Atom::Momentum(i)))
}

/// Vector with only a third component, e.g. `(0, 0, Theta)`.
pub fn axial_vec(c: ScalarCoeff) -> Vec3Expr {
    Vec3Expr([OperatorExpr::zero(), OperatorExpr::zero(), OperatorExpr::scalar(c)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_terms_merge_and_cancel() {
        let x1 = OperatorExpr::atom(Atom::Position(1));
        let sum = &x1 + &x1;
        assert_eq!(sum.len(), 1);
        assert_eq!(sum.terms().next().unwrap().coeff, ScalarCoeff::integer(2));
        assert!((&sum - &sum).is_zero());
    }

    #[test]
    fn different_constants_do_not_merge() {
        let x1 = OperatorExpr::atom(Atom::Position(1));
        let e = &x1.scale(ScalarCoeff::constant(Constant::Theta)) + &x1.scale(ScalarCoeff::constant(Constant::Eta));
        assert_eq!(e.len(), 2);
    }

    #[test]
    fn product_keeps_order() {
        let a = OperatorExpr::atom(Atom::Momentum(1));
        let b = OperatorExpr::atom(Atom::Position(1));
        let ab = &a * &b;
        assert_eq!(ab.terms().next().unwrap().factors, vec![Atom::Momentum(1), Atom::Position(1)]);
    }

    #[test]
    fn cross_product_of_axial_vector() {
        let theta = axial_vec(ScalarCoeff::constant(Constant::Theta));
        let g = alpha_vec();
        let t = theta.cross(&g);
        // (0,0,T) x (a1,a2,a3) = (-T a2, T a1, 0)
        assert_eq!(t[0], OperatorExpr::term(-ScalarCoeff::constant(Constant::Theta), vec![Atom::Alpha(2)]));
        assert_eq!(t[1], OperatorExpr::term(ScalarCoeff::constant(Constant::Theta), vec![Atom::Alpha(1)]));
        assert!(t[2].is_zero());
    }
}
