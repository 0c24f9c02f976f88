use num_traits::One;

use crate::error::{Error, Result};
use crate::operator_ir::{Atom, OperatorExpr, ScalarCoeff};

use super::params::{levi_civita, ConventionConfig, NCParameters};

/// Image of a single coordinate or momentum under the shift, `None` for
/// atoms the shift leaves alone.
///
/// `x_i -> A x_i - ε_ijk Θ_k p_j / (d A)` and
/// `p_i -> B p_i + ε_ijk η_k x_j / (d B)`, where `d` is the configured
/// multiple of ħ.
pub fn bopp_image(a: Atom, p: &NCParameters, conv: &ConventionConfig) -> Option<OperatorExpr> {
    let (i, scale, sign, partner): (u8, _, i64, fn(u8) -> Atom) = match a {
        Atom::Position(i) => (i, p.a_scale, -1, Atom::Momentum),
        Atom::Momentum(i) => (i, p.b_scale, 1, Atom::Position),
        _ => return None,
    };
    let strength = |k: u8| match a {
        Atom::Position(_) => p.theta_component(k),
        _ => p.eta_component(k),
    };
    let scale = ScalarCoeff::rational(scale);
    let denom = ScalarCoeff::integer(conv.bopp_denominator.multiple()) * p.hbar * scale;
    let inv = denom.inverse().expect("Bopp denominator must be nonzero");
    let mut image = OperatorExpr::term(scale, vec![a]);
    for j in 1..=3u8 {
        for k in 1..=3u8 {
            let eps = levi_civita(i, j, k);
            if eps != 0 {
                image.add_term(ScalarCoeff::integer(sign * eps) * strength(k) * inv, vec![partner(j)]);
            }
        }
    }
    Some(image)
}

/// Rewrites noncommutative coordinates in terms of commutative ones.
///
/// Field atoms depend on position, so they are rejected whenever positions
/// actually move; expand fields into polynomials before shifting.
pub fn bopp_shift(e: &OperatorExpr, p: &NCParameters, conv: &ConventionConfig) -> Result<OperatorExpr> {
    let positions_move = !p.theta.is_zero() || !p.a_scale.is_one();
    if positions_move {
        if let Some(f) = e.atoms().find(|a| a.is_field()) {
            return Err(Error::FieldInShiftedCoordinates(f));
        }
    }
    Ok(e.substitute(|a| bopp_image(a, p, conv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_ir::{commutator, AlgebraContext, Constant};

    fn theta() -> ScalarCoeff {
        ScalarCoeff::constant(Constant::Theta)
    }

    fn hbar_inv() -> ScalarCoeff {
        ScalarCoeff::constant_pow(Constant::Hbar, -1)
    }

    #[test]
    fn x1_shifts_by_theta_p2_over_four_hbar() {
        let img = bopp_shift(&OperatorExpr::atom(Atom::Position(1)), &NCParameters::symbolic(), &ConventionConfig::standard()).unwrap();
        let expected = &OperatorExpr::atom(Atom::Position(1))
            - &OperatorExpr::term(ScalarCoeff::ratio(1, 4) * theta() * hbar_inv(), vec![Atom::Momentum(2)]);
        assert_eq!(img, expected);
    }

    #[test]
    fn commutative_parameters_give_identity_map() {
        let e = OperatorExpr::term(ScalarCoeff::integer(3), vec![Atom::Position(1), Atom::Momentum(2), Atom::Alpha(1)]);
        assert_eq!(bopp_shift(&e, &NCParameters::commutative(), &ConventionConfig::standard()).unwrap(), e);
    }

    #[test]
    fn shifted_positions_fail_to_commute() {
        let (p, conv) = (NCParameters::symbolic(), ConventionConfig::standard());
        let x = |i| bopp_shift(&OperatorExpr::atom(Atom::Position(i)), &p, &conv).unwrap();
        let c = commutator(&x(1), &x(2), &AlgebraContext::commutative()).unwrap();
        assert_eq!(c, OperatorExpr::scalar(ScalarCoeff::ratio(1, 2) * ScalarCoeff::i() * theta()));
    }

    #[test]
    fn fields_are_rejected_when_positions_shift() {
        let e = OperatorExpr::atom(Atom::AField(1));
        let err = bopp_shift(&e, &NCParameters::symbolic(), &ConventionConfig::standard()).unwrap_err();
        assert!(matches!(err, Error::FieldInShiftedCoordinates(Atom::AField(1))));
        // momentum-only shift leaves fields alone
        let eta_only = NCParameters::symbolic().with_theta(ScalarCoeff::zero());
        assert_eq!(bopp_shift(&e, &eta_only, &ConventionConfig::standard()).unwrap(), e);
    }
}
