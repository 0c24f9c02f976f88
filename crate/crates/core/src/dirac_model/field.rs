use crate::error::{Error, Result};
use crate::operator_ir::{
    coordinate_derivative, symbol_normal_form, Atom, Constant, FieldRef, MomentumRule, OperatorExpr, ScalarCoeff,
    Vec3Expr,
};

/// Static electromagnetic potentials, each a polynomial in the coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    vector_potential: [OperatorExpr; 3],
    scalar_potential: OperatorExpr,
}

impl FieldSpec {
    /// No fields at all.
    pub fn free() -> Self {
        FieldSpec {
            vector_potential: Default::default(),
            scalar_potential: OperatorExpr::zero(),
        }
    }

    /// `A = (-B x2 / 2, B x1 / 2, 0)` and `Φ = -E·r`.
    pub fn symmetric_gauge(b: ScalarCoeff, e: [ScalarCoeff; 3]) -> Self {
        let half_b = ScalarCoeff::ratio(1, 2) * b;
        let vector_potential = [
            OperatorExpr::term(-half_b, vec![Atom::Position(2)]),
            OperatorExpr::term(half_b, vec![Atom::Position(1)]),
            OperatorExpr::zero(),
        ];
        let mut scalar_potential = OperatorExpr::zero();
        for (k, ek) in e.iter().enumerate() {
            scalar_potential.add_term(-*ek, vec![Atom::Position(k as u8 + 1)]);
        }
        FieldSpec {
            vector_potential,
            scalar_potential,
        }
    }

    /// Symmetric gauge with symbolic `B` and uniform symbolic `E`.
    pub fn symbolic() -> Self {
        Self::symmetric_gauge(
            ScalarCoeff::constant(Constant::B),
            [1, 2, 3].map(|k| ScalarCoeff::constant(Constant::electric(k))),
        )
    }

    /// Arbitrary polynomial potentials in the coordinates.
    pub fn custom(vector_potential: [OperatorExpr; 3], scalar_potential: OperatorExpr) -> Result<Self> {
        let check = |e: &OperatorExpr, name: String| -> Result<OperatorExpr> {
            match e.atoms().find(|a| !matches!(a, Atom::Position(_))) {
                Some(a) => Err(Error::NonPolynomial(format!(
                    "{name} must be a polynomial in x[1..3], found {a}"
                ))),
                None => Ok(symbol_normal_form(e)),
            }
        };
        Ok(FieldSpec {
            vector_potential: [
                check(&vector_potential[0], "A[1]".into())?,
                check(&vector_potential[1], "A[2]".into())?,
                check(&vector_potential[2], "A[3]".into())?,
            ],
            scalar_potential: check(&scalar_potential, "Phi".into())?,
        })
    }

    pub fn potential(&self, field: FieldRef) -> &OperatorExpr {
        match field {
            FieldRef::Phi => &self.scalar_potential,
            FieldRef::A(i) => &self.vector_potential[i as usize - 1],
        }
    }

    pub fn vector_potential(&self) -> Vec3Expr {
        Vec3Expr(self.vector_potential.clone())
    }

    pub fn scalar_potential(&self) -> &OperatorExpr {
        &self.scalar_potential
    }

    /// Mixed partial derivative of a potential as a polynomial.
    pub fn derivative(&self, field: FieldRef, orders: [u8; 3]) -> OperatorExpr {
        let mut e = self.potential(field).clone();
        for (axis, &n) in orders.iter().enumerate() {
            for _ in 0..n {
                e = coordinate_derivative(&e, axis as u8 + 1, MomentumRule::Reject)
                    .expect("potentials contain coordinates only");
            }
        }
        symbol_normal_form(&e)
    }

    pub fn derivative_vanishes(&self, field: FieldRef, orders: [u8; 3]) -> bool {
        self.derivative(field, orders).is_zero()
    }

    /// Highest total degree over all potentials.
    pub fn degree(&self) -> usize {
        self.vector_potential
            .iter()
            .chain(std::iter::once(&self.scalar_potential))
            .flat_map(|e| e.terms().map(|t| t.factors.len()).collect::<Vec<_>>())
            .max()
            .unwrap_or(0)
    }

    /// True when every gradient is constant, so all second derivatives vanish.
    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    /// Replaces every field and derivative atom by its polynomial.
    pub fn expand(&self, e: &OperatorExpr) -> OperatorExpr {
        e.substitute(|a| a.field_parts().map(|(field, orders)| self.derivative(field, orders)))
    }

    /// `E = -∇Φ` (static potentials).
    pub fn electric_field(&self) -> Vec3Expr {
        Vec3Expr::from_fn(|k| -self.derivative(FieldRef::Phi, unit(k)))
    }

    /// `curl A`.
    pub fn magnetic_field(&self) -> Vec3Expr {
        let d = |field: u8, axis: u8| self.derivative(FieldRef::A(field), unit(axis));
        Vec3Expr([&d(3, 2) - &d(2, 3), &d(1, 3) - &d(3, 1), &d(2, 1) - &d(1, 2)])
    }

    /// Sets a symbolic constant to zero wherever it appears.
    pub fn set_to_zero(&self, c: Constant) -> Self {
        FieldSpec {
            vector_potential: self.vector_potential.clone().map(|e| e.set_to_zero(c)),
            scalar_potential: self.scalar_potential.set_to_zero(c),
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self::symbolic()
    }
}

/// Derivative multi-index for a single first derivative.
pub fn unit(axis: u8) -> [u8; 3] {
    let mut o = [0; 3];
    o[axis as usize - 1] = 1;
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_ir::{differentiate, AlgebraContext};

    #[test]
    fn symmetric_gauge_curl_is_b_along_three() {
        let f = FieldSpec::symbolic();
        let curl = f.magnetic_field();
        assert!(curl[0].is_zero() && curl[1].is_zero());
        assert_eq!(curl[2], OperatorExpr::constant(Constant::B));
    }

    #[test]
    fn uniform_electric_field_is_recovered() {
        let f = FieldSpec::symbolic();
        for k in 1..=3 {
            assert_eq!(*f.electric_field().axis(k), OperatorExpr::constant(Constant::electric(k)));
        }
    }

    #[test]
    fn differentiate_resolves_fields() {
        let ctx = AlgebraContext::commutative().with_field(FieldSpec::symbolic());
        let d = differentiate(&OperatorExpr::atom(Atom::AField(1)), 2, &ctx).unwrap();
        assert_eq!(d, OperatorExpr::scalar(ScalarCoeff::ratio(-1, 2) * ScalarCoeff::constant(Constant::B)));
        let d = differentiate(&OperatorExpr::atom(Atom::Phi), 1, &ctx).unwrap();
        assert_eq!(d, OperatorExpr::scalar(-ScalarCoeff::constant(Constant::E1)));
    }

    #[test]
    fn second_derivatives_of_linear_fields_vanish() {
        let f = FieldSpec::symbolic();
        assert!(f.is_linear());
        assert!(f.derivative_vanishes(FieldRef::A(1), [0, 2, 0]));
        assert!(f.derivative_vanishes(FieldRef::A(1), [1, 1, 0]));
        assert!(!f.derivative_vanishes(FieldRef::A(1), [0, 1, 0]));
    }

    #[test]
    fn custom_rejects_momenta() {
        let bad = FieldSpec::custom(Default::default(), OperatorExpr::atom(Atom::Momentum(1)));
        assert!(matches!(bad, Err(Error::NonPolynomial(_))));
    }
}
