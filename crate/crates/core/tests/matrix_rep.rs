use num_complex::Complex64;
use ncdirac::dirac_model::FieldSpec;
use ncdirac::matrix_rep::{
    dirac_alpha, dirac_beta, ehrenfest_residual, evolve, gaussian_packet, hermiticity_residual, identity_residual,
    ConstantValues, CsrMatrix, FockBasisConfig, Realizer, SpectralDecomposition,
};
use ncdirac::operator_ir::{parse, parse_expr, Atom, Constant, Expr, OperatorExpr, ScalarCoeff};
use ncdirac::Error;
use proptest::prelude::*;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn realizer(dim: usize, levels: usize, guard: usize) -> Realizer {
    Realizer::new(
        FockBasisConfig::new(dim, levels, 1.0, guard).unwrap(),
        ConstantValues::default_scenario(),
        FieldSpec::symbolic(),
    )
    .unwrap()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-12
}

#[test]
fn dirac_representation() {
    let id = CsrMatrix::identity(4);
    let beta = dirac_beta();
    for i in 1..=3u8 {
        let a = dirac_alpha(i);
        assert!(a.matmul(&a).sub(&id).max_abs() < 1e-15);
        assert!(a.matmul(&beta).add(&beta.matmul(&a)).max_abs() < 1e-15);
        for j in (i + 1)..=3u8 {
            let b = dirac_alpha(j);
            assert!(a.matmul(&b).add(&b.matmul(&a)).max_abs() < 1e-15);
        }
        assert_eq!(hermiticity_residual(&a), 0.0);
    }
    // beta = diag(1, 1, -1, -1); alpha_2 = offdiag(sigma_y, sigma_y)
    for (k, v) in [1.0, 1.0, -1.0, -1.0].iter().enumerate() {
        assert_eq!(beta.get(k, k), Complex64::new(*v, 0.0));
    }
    let a2 = dirac_alpha(2);
    assert_eq!(a2.get(0, 3), Complex64::new(0.0, -1.0));
    assert_eq!(a2.get(1, 2), Complex64::new(0.0, 1.0));
}

#[test]
fn ladder_matrix_elements() {
    // hbar = m = omega = 1: <n|x|n+1> = sqrt((n+1)/2), <n|p|n+1> = -i sqrt((n+1)/2)
    let r = realizer(1, 8, 3);
    let x = r.realize(&OperatorExpr::atom(Atom::Position(1))).unwrap();
    let p = r.realize(&OperatorExpr::atom(Atom::Momentum(1))).unwrap();
    for n in 0..7 {
        let s = ((n + 1) as f64 / 2.0).sqrt();
        assert!(close(x.get(n, n + 1), Complex64::new(s, 0.0)));
        assert!(close(p.get(n, n + 1), Complex64::new(0.0, -s)));
        assert!(close(p.get(n + 1, n), Complex64::new(0.0, s)));
    }
    // spinor index is the most significant: block 2 repeats block 0
    assert!(close(x.get(16, 17), x.get(0, 1)));
}

#[test]
fn canonical_commutator_on_guarded_subspace() {
    let r = realizer(2, 10, 3);
    for i in 1..=2u8 {
        for j in 1..=2u8 {
            let lhs = parse(&format!("[x[{i}], p[{j}]]")).unwrap();
            let rhs = if i == j { parse("i*hbar").unwrap() } else { parse("0").unwrap() };
            let rep = identity_residual("xp", &lhs, &rhs, &r, 1e-12).unwrap();
            assert!(rep.pass, "[x{i}, p{j}] residual {}", rep.residual);
        }
    }
    // On the full space the truncation shows up in the top level:
    // [x, p] there is i*hbar*(1 - N).
    let small = realizer(1, 10, 3);
    let full = small.realize_tree(&parse("[x[1], p[1]]").unwrap()).unwrap();
    assert!(close(full.get(9, 9), Complex64::new(0.0, -9.0)));
    assert!(close(full.get(8, 8), Complex64::new(0.0, 1.0)));
    assert!(FockBasisConfig::new(1, 10, 1.0, 0).is_err());
}

#[test]
fn transverse_axes() {
    let r = realizer(2, 8, 3);
    assert_eq!(r.realize(&parse_expr("p[3]").unwrap()).unwrap().nnz(), 0);
    assert!(matches!(
        r.realize(&parse_expr("x[3]").unwrap()),
        Err(Error::AxisOutOfRange { .. })
    ));
    // E3 = 0 removes the x[3] term of the default potential.
    assert!(r.realize(&parse_expr("Phi").unwrap()).is_ok());
}

#[test]
fn basis_validation() {
    assert!(FockBasisConfig::new(2, 16, 1.0, 8).is_err());
    assert!(FockBasisConfig::new(4, 16, 1.0, 6).is_err());
    assert!(FockBasisConfig::new(2, 4, 1.0, 1).is_err());
    assert!(FockBasisConfig::new(2, 16, 0.0, 6).is_err());
    let b = FockBasisConfig::new(2, 16, 1.0, 6).unwrap();
    assert_eq!(b.total_dim(), 4 * 256);
    let kept = b.guard_mask().iter().filter(|k| **k).count();
    assert_eq!(kept, 4 * 10 * 10);
}

#[test]
fn unbound_constant_is_reported() {
    let r = Realizer::new(
        FockBasisConfig::new(1, 8, 1.0, 3).unwrap(),
        ConstantValues::empty().with(Constant::Hbar, 1.0).with(Constant::Mass, 1.0),
        FieldSpec::free(),
    )
    .unwrap();
    assert!(matches!(r.realize(&parse_expr("c*alpha[1]").unwrap()), Err(Error::UnboundConstant(Constant::C))));
}

#[test]
fn non_hermitian_operator_is_rejected() {
    let r = realizer(1, 8, 3);
    let m = r.realize(&parse_expr("i*x[1]*p[1]").unwrap()).unwrap();
    assert!(hermiticity_residual(&m) > 1e-3);
    assert!(matches!(SpectralDecomposition::new(&m), Err(Error::NonHermitian { .. })));
}

#[test]
fn packet_spill_is_rejected() {
    let r = realizer(1, 10, 3);
    let spinor = [ONE, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    assert!(gaussian_packet(&r, &[0.0], &[0.0], spinor).is_ok());
    assert!(matches!(gaussian_packet(&r, &[4.0], &[0.0], spinor), Err(Error::OccupancySpill { .. })));
    assert!(gaussian_packet(&r, &[0.0, 0.0], &[0.0], spinor).is_err());
}

#[test]
fn oscillator_follows_classical_orbit() {
    // H = (p^2 + x^2)/2 with hbar = m = omega = 1; a coherent state centred
    // at (x0, p0) moves on x(t) = x0 cos t + p0 sin t.
    let r = realizer(1, 40, 10);
    let h = r.realize(&parse_expr("1/2*p[1]*p[1] + 1/2*x[1]*x[1]").unwrap()).unwrap();
    let spectrum = SpectralDecomposition::new(&h).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    let psi = gaussian_packet(&r, &[1.0], &[0.5], [ONE, zero, zero, zero]).unwrap();
    let obs = vec![
        ("x1".to_string(), r.realize(&parse_expr("x[1]").unwrap()).unwrap()),
        ("p1".to_string(), r.realize(&parse_expr("p[1]").unwrap()).unwrap()),
    ];
    let traj = evolve(&spectrum, &psi, 1.0, 0.01, 300, &obs);
    let x = traj.column("x1").unwrap();
    for (k, t) in traj.times.iter().enumerate() {
        assert!((x[k] - (t.cos() + 0.5 * t.sin())).abs() < 1e-9, "t = {t}");
    }
    assert!(traj.max_norm_drift() < 1e-12);
    let e = ehrenfest_residual(&traj, "x1", "p1").unwrap();
    // central difference error ~ dt^2/6 |x'''|
    assert!(e.max < 1e-4 && e.max > 1e-7, "{}", e.max);
}

#[test]
fn trajectory_csv_layout() {
    let r = realizer(1, 8, 3);
    let h = r.realize(&parse_expr("beta").unwrap()).unwrap();
    let spectrum = SpectralDecomposition::new(&h).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    let psi = gaussian_packet(&r, &[0.0], &[0.0], [ONE, zero, zero, zero]).unwrap();
    let traj = evolve(&spectrum, &psi, 1.0, 0.1, 3, &[("b".into(), h)]);
    let csv = traj.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,norm,b");
    assert_eq!(lines.len(), 5);
    assert!(traj.column("missing").is_err());
}

fn poly() -> impl Strategy<Value = OperatorExpr> {
    let atom = prop_oneof![
        (1u8..=2).prop_map(Atom::Position),
        (1u8..=2).prop_map(Atom::Momentum),
        (1u8..=3).prop_map(Atom::Alpha),
        Just(Atom::Beta),
    ];
    prop::collection::vec((-2i64..=2, any::<bool>(), prop::collection::vec(atom, 0..=2)), 1..=3).prop_map(|ts| {
        let mut e = OperatorExpr::zero();
        for (c, imaginary, f) in ts {
            let mut s = ScalarCoeff::integer(c);
            if imaginary {
                s = s * ScalarCoeff::i();
            }
            e.add_term(s, f);
        }
        e
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symbolic_and_matrix_commutators_agree(a in poly(), b in poly()) {
        let r = realizer(2, 10, 3);
        let ctx = ncdirac::operator_ir::AlgebraContext::commutative();
        let symbolic = ncdirac::operator_ir::commutator(&a, &b, &ctx).unwrap();
        let lhs = Expr::commutator(Expr::literal(&a), Expr::literal(&b));
        let rep = identity_residual("cross", &lhs, &Expr::literal(&symbolic), &r, 1e-10).unwrap();
        prop_assert!(rep.pass, "residual {}", rep.residual);
    }

    #[test]
    fn realize_is_linear_and_multiplicative(a in poly(), b in poly()) {
        let r = realizer(2, 10, 3);
        let ra = r.realize(&a).unwrap();
        let rb = r.realize(&b).unwrap();
        let sum = r.realize(&(&a + &b)).unwrap();
        prop_assert!(sum.sub(&ra.add(&rb)).max_abs() < 1e-12);
        let prod = r.realize(&(&a * &b)).unwrap();
        prop_assert!(prod.sub(&ra.matmul(&rb)).max_abs() < 1e-12);
    }
}
