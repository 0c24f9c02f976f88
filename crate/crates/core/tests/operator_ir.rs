use ncdirac::nc_algebra::{ConventionConfig, NCParameters};
use ncdirac::operator_ir::{
    anticommutator, canonicalize, commutator, parse, parse_canonical, parse_expr, reduce_dirac, render_plain,
    AlgebraContext, AlgebraMode, Atom, Constant, OperatorExpr, ScalarCoeff,
};
use ncdirac::Error;
use proptest::prelude::*;

fn commutative() -> AlgebraContext {
    AlgebraContext::commutative()
}

fn phase_space() -> AlgebraContext {
    AlgebraContext::new(
        AlgebraMode::NCPhaseSpace,
        NCParameters::symbolic(),
        ConventionConfig::standard(),
        None,
    )
}

fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (1u8..=3).prop_map(Atom::Position),
        (1u8..=3).prop_map(Atom::Momentum),
        (1u8..=3).prop_map(Atom::Alpha),
        Just(Atom::Beta),
    ]
}

fn coefficient() -> impl Strategy<Value = ScalarCoeff> {
    (-3i64..=3, 1i64..=2, any::<bool>(), prop::option::of(prop::sample::select(vec![Constant::C, Constant::Charge, Constant::B])))
        .prop_filter("nonzero", |(n, ..)| *n != 0)
        .prop_map(|(n, d, imaginary, c)| {
            let mut s = ScalarCoeff::ratio(n, d);
            if imaginary {
                s = s * ScalarCoeff::i();
            }
            if let Some(c) = c {
                s = s * ScalarCoeff::constant(c);
            }
            s
        })
}

/// Small non-canonical words: up to `terms` terms of up to `len` atoms.
fn expr(terms: usize, len: usize) -> impl Strategy<Value = OperatorExpr> {
    prop::collection::vec((coefficient(), prop::collection::vec(atom(), 0..=len)), 1..=terms).prop_map(|ts| {
        let mut e = OperatorExpr::zero();
        for (c, f) in ts {
            e.add_term(c, f);
        }
        e
    })
}

fn i_hbar() -> OperatorExpr {
    OperatorExpr::scalar(ScalarCoeff::i() * ScalarCoeff::constant(Constant::Hbar))
}

#[test]
fn canonical_commutators() {
    let ctx = commutative();
    for i in 1..=3u8 {
        for j in 1..=3u8 {
            let xp = commutator(&Atom::Position(i).into(), &Atom::Momentum(j).into(), &ctx).unwrap();
            assert_eq!(xp, if i == j { i_hbar() } else { OperatorExpr::zero() });
            assert!(commutator(&Atom::Position(i).into(), &Atom::Position(j).into(), &ctx).unwrap().is_zero());
            assert!(commutator(&Atom::Momentum(i).into(), &Atom::Momentum(j).into(), &ctx).unwrap().is_zero());
        }
    }
}

#[test]
fn square_of_position_against_momentum() {
    let ctx = commutative();
    let lhs = parse_canonical("[x[1]*x[1], p[1]]", &ctx).unwrap();
    let expected = OperatorExpr::term(ScalarCoeff::integer(2) * ScalarCoeff::i() * ScalarCoeff::constant(Constant::Hbar), vec![Atom::Position(1)]);
    assert_eq!(lhs, expected);
}

#[test]
fn dirac_matrices_close() {
    let ctx = commutative();
    for i in 1..=3u8 {
        for j in 1..=3u8 {
            let a = anticommutator(&Atom::Alpha(i).into(), &Atom::Alpha(j).into(), &ctx).unwrap();
            let expected = if i == j { OperatorExpr::scalar(ScalarCoeff::integer(2)) } else { OperatorExpr::zero() };
            assert_eq!(a, expected, "alpha{i} alpha{j}");
        }
        assert!(anticommutator(&Atom::Alpha(i).into(), &Atom::Beta.into(), &ctx).unwrap().is_zero());
    }
    assert_eq!(reduce_dirac(&[Atom::Beta, Atom::Beta]), (1, vec![]));
    // alpha2 alpha1 = -alpha1 alpha2
    assert_eq!(reduce_dirac(&[Atom::Alpha(2), Atom::Alpha(1)]), (-1, vec![Atom::Alpha(1), Atom::Alpha(2)]));
}

#[test]
fn field_commutator_gives_gradient() {
    let ctx = commutative();
    let e = parse_canonical("[Phi, p[2]]", &ctx).unwrap();
    assert_eq!(render_plain(&e), "i*hbar*d[2](Phi)");
}

#[test]
fn syntax_errors_carry_columns() {
    match parse("x[1] + * p[2]") {
        Err(Error::Syntax { column, .. }) => assert_eq!(column, 8),
        other => panic!("{other:?}"),
    }
    match parse("x[1] + q") {
        Err(Error::UnknownSymbol { name, column }) => {
            assert_eq!(name, "q");
            assert_eq!(column, 8);
        }
        other => panic!("{other:?}"),
    }
    assert!(parse("x[4]").is_err());
}

#[test]
fn parse_keeps_written_order() {
    let e = parse_expr("p[1]*x[1]").unwrap();
    assert_eq!(e.terms().next().unwrap().factors, vec![Atom::Momentum(1), Atom::Position(1)]);
    let c = canonicalize(&e, &commutative()).unwrap();
    assert_eq!(render_plain(&c), "-i*hbar + x[1]*p[1]");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent(e in expr(4, 4)) {
        for ctx in [commutative(), phase_space()] {
            let once = canonicalize(&e, &ctx).unwrap();
            prop_assert_eq!(canonicalize(&once, &ctx).unwrap(), once);
        }
    }

    #[test]
    fn render_parse_roundtrip(e in expr(4, 3)) {
        let ctx = commutative();
        let c = canonicalize(&e, &ctx).unwrap();
        prop_assert_eq!(parse_canonical(&render_plain(&c), &ctx).unwrap(), c);
    }

    #[test]
    fn commutator_is_antisymmetric_and_bilinear(a in expr(3, 2), b in expr(3, 2), c in expr(3, 2), k in coefficient()) {
        for ctx in [commutative(), phase_space()] {
            let ab = commutator(&a, &b, &ctx).unwrap();
            let ba = commutator(&b, &a, &ctx).unwrap();
            prop_assert!(canonicalize(&(&ab + &ba), &ctx).unwrap().is_zero());
            let lhs = commutator(&(&a.scale(k) + &c), &b, &ctx).unwrap();
            let rhs = canonicalize(&(&ab.scale(k) + &commutator(&c, &b, &ctx).unwrap()), &ctx).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jacobi_identity(a in expr(2, 2), b in expr(2, 2), c in expr(2, 2)) {
        for ctx in [commutative(), phase_space()] {
            let cyc = |x: &OperatorExpr, y: &OperatorExpr, z: &OperatorExpr| {
                commutator(x, &commutator(y, z, &ctx).unwrap(), &ctx).unwrap()
            };
            let sum = &(&cyc(&a, &b, &c) + &cyc(&b, &c, &a)) + &cyc(&c, &a, &b);
            prop_assert!(canonicalize(&sum, &ctx).unwrap().is_zero());
        }
    }

    #[test]
    fn leibniz_rule(a in expr(2, 2), b in expr(2, 2), c in expr(2, 2)) {
        for ctx in [commutative(), phase_space()] {
            let lhs = commutator(&a, &(&b * &c), &ctx).unwrap();
            let rhs = &(&commutator(&a, &b, &ctx).unwrap() * &c) + &(&b * &commutator(&a, &c, &ctx).unwrap());
            prop_assert_eq!(lhs, canonicalize(&rhs, &ctx).unwrap());
        }
    }

    #[test]
    fn canonical_form_respects_products(a in expr(3, 3), b in expr(3, 3)) {
        let ctx = phase_space();
        let direct = canonicalize(&(&a * &b), &ctx).unwrap();
        let staged = canonicalize(&(&canonicalize(&a, &ctx).unwrap() * &canonicalize(&b, &ctx).unwrap()), &ctx).unwrap();
        prop_assert_eq!(direct, staged);
    }
}
