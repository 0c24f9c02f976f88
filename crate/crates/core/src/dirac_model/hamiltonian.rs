use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::nc_algebra::{bopp_shift, ConventionConfig, NCParameters};
use crate::operator_ir::{
    alpha_vec, canonicalize, coordinate_derivative, momentum_vec, position_vec, render_plain, AlgebraContext,
    AlgebraMode, Atom, Constant, MomentumRule, OperatorExpr, Rational, ScalarCoeff, Vec3Expr,
};

use super::field::FieldSpec;

fn k(c: Constant) -> ScalarCoeff {
    ScalarCoeff::constant(c)
}

/// Vector of field atoms `(A1, A2, A3)`.
pub fn vector_potential_atoms() -> Vec3Expr {
    Vec3Expr::from_fn(|i| OperatorExpr::atom(Atom::AField(i)))
}

/// Commutative algebra carrying the field specification and ħ.
pub fn field_context(field: &FieldSpec, p: &NCParameters, conv: &ConventionConfig) -> AlgebraContext {
    AlgebraContext::new(AlgebraMode::Commutative, p.clone(), *conv, Some(field.clone()))
}

/// `cα·(p − (e/c)A) + eΦ + βmc²` with the potentials kept as field atoms.
pub fn commutative_hamiltonian_symbolic() -> OperatorExpr {
    let alpha = alpha_vec();
    let kinetic = alpha.dot(&momentum_vec()).scale(k(Constant::C));
    let coupling = alpha.dot(&vector_potential_atoms()).scale(-k(Constant::Charge));
    let scalar = OperatorExpr::term(k(Constant::Charge), vec![Atom::Phi]);
    let mass = OperatorExpr::term(
        k(Constant::Mass) * k(Constant::C).pow(2),
        vec![Atom::Beta],
    );
    kinetic + coupling + scalar + mass
}

/// The commutative Hamiltonian with potentials expanded into polynomials.
pub fn commutative_hamiltonian(field: &FieldSpec) -> Result<OperatorExpr> {
    let ctx = field_context(field, &NCParameters::commutative(), &ConventionConfig::standard());
    canonicalize(&field.expand(&commutative_hamiltonian_symbolic()), &ctx)
}

/// Correction terms of orders `1..=max_order` of `H ⋆ ψ` in the space
/// sector, as operators acting on ψ.
///
/// Derivatives on ψ become momenta by `∂_b ψ ↔ (i/ħ) p_b ψ`; derivatives on
/// `H` treat momenta as constants. The order-`n` term is
/// `(1/n!) (i/2)^n (i/ħ)^n Θ_{a1b1}…Θ_{anbn} (∂_{a1…an} H) p_{b1}…p_{bn}`.
pub fn space_deformation(
    h: &OperatorExpr,
    field: &FieldSpec,
    p: &NCParameters,
    conv: &ConventionConfig,
    max_order: u32,
) -> Result<OperatorExpr> {
    let ctx = field_context(field, p, conv);
    let theta = conv.theta_matrix(p);
    let entries: Vec<(ScalarCoeff, u8, u8)> = (0..3)
        .flat_map(|a| (0..3).map(move |b| (a, b)))
        .filter(|&(a, b)| !theta[a][b].is_zero())
        .map(|(a, b)| (theta[a][b], a as u8 + 1, b as u8 + 1))
        .collect();
    let step = ScalarCoeff::ratio(1, 2) * ScalarCoeff::i() * ScalarCoeff::i() * p.hbar_inverse();
    let mut total = OperatorExpr::zero();
    // (coefficient, ∂…H, trailing momenta)
    let mut layer = vec![(ScalarCoeff::one(), h.clone(), Vec::<Atom>::new())];
    for n in 1..=max_order {
        let mut next = Vec::new();
        for (c, dh, momenta) in &layer {
            for &(w, a, b) in &entries {
                let d = canonicalize(&coordinate_derivative(dh, a, MomentumRule::Constant)?, &ctx)?;
                if d.is_zero() {
                    continue;
                }
                let mut m = momenta.clone();
                m.push(Atom::Momentum(b));
                next.push((*c * w * step, d, m));
            }
        }
        if next.is_empty() {
            break;
        }
        let inv_fact = ScalarCoeff::rational(Rational::new(1, (1..=n as i64).product()));
        for (c, dh, momenta) in &next {
            total += (dh * &OperatorExpr::term(ScalarCoeff::one(), momenta.clone())).scale(*c * inv_fact);
        }
        layer = next;
    }
    canonicalize(&total, &ctx)
}

/// `H` plus its space star-product correction through `max_order`.
pub fn space_deformed_hamiltonian(
    h: &OperatorExpr,
    field: &FieldSpec,
    p: &NCParameters,
    conv: &ConventionConfig,
    max_order: u32,
) -> Result<OperatorExpr> {
    let ctx = field_context(field, p, conv);
    canonicalize(&(h + &space_deformation(h, field, p, conv, max_order)?), &ctx)
}

/// `G = ∇(α·A − Φ)` with field derivative atoms.
pub fn coupling_gradient() -> Vec3Expr {
    let alpha = alpha_vec();
    Vec3Expr::from_fn(|a| {
        let da = |atom: Atom| OperatorExpr::atom(atom.partial_of(a).expect("field atom"));
        let mut g = -da(Atom::Phi);
        for i in 1..=3u8 {
            g += &alpha.axis(i).clone() * &da(Atom::AField(i));
        }
        g
    })
}

/// Published shape `(α × r)·η⃗` of the momentum-shift term.
pub fn eta_structure(p: &NCParameters) -> OperatorExpr {
    alpha_vec().cross(&position_vec()).dot(&p.eta_vec())
}

/// Published shape `(∇(α·A − Φ) × p)·Θ⃗` of the star-product term.
pub fn theta_structure(p: &NCParameters) -> OperatorExpr {
    coupling_gradient().cross(&momentum_vec()).dot(&p.theta_vec())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HamiltonianPiece {
    pub name: &'static str,
    #[serde(serialize_with = "serialize_expr")]
    pub expr: OperatorExpr,
    pub provenance: &'static str,
    pub reference: &'static str,
}

fn serialize_expr<S: serde::Serializer>(e: &OperatorExpr, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&render_plain(e))
}

/// A deformation coefficient compared with the published one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientNote {
    pub term: &'static str,
    pub structure: String,
    pub derived: Option<String>,
    pub reference: String,
    pub matches: bool,
}

#[derive(Debug, Clone)]
pub struct HamiltonianBundle {
    /// `cα·(p − eA/c) + eΦ + βmc²`, potentials as atoms.
    pub commutative: OperatorExpr,
    /// After the space star product.
    pub space_deformed: OperatorExpr,
    /// After the momentum shift, first order in η.
    pub nc: OperatorExpr,
    pub pieces: Vec<HamiltonianPiece>,
    pub coefficients: Vec<CoefficientNote>,
    pub notes: Vec<String>,
    pub field: FieldSpec,
    pub params: NCParameters,
    pub conventions: ConventionConfig,
    pub star_order: u32,
}

impl HamiltonianBundle {
    pub fn context(&self) -> AlgebraContext {
        field_context(&self.field, &self.params, &self.conventions)
    }

    pub fn piece(&self, name: &str) -> Option<&OperatorExpr> {
        self.pieces.iter().find(|p| p.name == name).map(|p| &p.expr)
    }

    pub fn eta_term(&self) -> &OperatorExpr {
        self.piece("eta-term").expect("bundle always has an eta-term piece")
    }

    pub fn theta_term(&self) -> &OperatorExpr {
        self.piece("theta-term").expect("bundle always has a theta-term piece")
    }

    /// `H_nc` with potentials expanded into polynomials.
    pub fn expanded_nc(&self) -> Result<OperatorExpr> {
        canonicalize(&self.field.expand(&self.nc), &self.context())
    }

    pub fn expanded_commutative(&self) -> Result<OperatorExpr> {
        canonicalize(&self.field.expand(&self.commutative), &self.context())
    }

    /// One entry per term of `H_nc`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .nc
            .terms()
            .map(|t| {
                let piece = self.pieces.iter().find(|p| {
                    p.expr.terms().any(|q| q == t)
                });
                json!({
                    "coefficient": t.coeff.to_string(),
                    "factors": t.factors.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "provenance": piece.map_or("unattributed", |p| p.provenance),
                    "paper_eq": piece.map_or("", |p| p.reference),
                })
            })
            .collect();
        json!({
            "conventions": self.conventions.describe(),
            "star_order": self.star_order,
            "H_commutative": render_plain(&self.commutative),
            "H_space_deformed": render_plain(&self.space_deformed),
            "H_nc": render_plain(&self.nc),
            "terms": terms,
            "pieces": self.pieces,
            "coefficients": self.coefficients,
            "notes": self.notes,
        })
    }
}

fn coefficient_note(term: &'static str, piece: &OperatorExpr, structure: &OperatorExpr, reference: ScalarCoeff) -> CoefficientNote {
    let derived = piece.ratio_to(structure);
    CoefficientNote {
        term,
        structure: render_plain(structure),
        derived: derived.map(|c| c.to_string()),
        reference: reference.to_string(),
        matches: derived == Some(reference) || (piece.is_zero() && structure.is_zero()),
    }
}

/// Builds `H_nc`: the space star product applied to the commutative
/// Hamiltonian, followed by the momentum Bopp shift. Terms of mixed order
/// `Θη` are dropped.
pub fn deformed_hamiltonian(
    field: &FieldSpec,
    p: &NCParameters,
    conv: &ConventionConfig,
    star_order: u32,
) -> Result<HamiltonianBundle> {
    let ctx = field_context(field, p, conv);
    let commutative = canonicalize(&commutative_hamiltonian_symbolic(), &ctx)?;
    let theta_term = space_deformation(&commutative, field, p, conv, star_order)?;
    let space_deformed = canonicalize(&(&commutative + &theta_term), &ctx)?;

    let momentum_only = p.clone().with_theta(ScalarCoeff::zero());
    let shifted = canonicalize(&bopp_shift(&space_deformed, &momentum_only, conv)?, &ctx)?;
    let nc = shifted.filter(|t| !(t.coeff.consts().contains(Constant::Theta) && t.coeff.consts().contains(Constant::Eta)));
    let eta_term = canonicalize(&bopp_shift(&commutative, &momentum_only, conv)?, &ctx)? - commutative.clone();

    let alpha = alpha_vec();
    let base = |e: OperatorExpr| canonicalize(&e, &ctx);
    let pieces = vec![
        HamiltonianPiece {
            name: "kinetic",
            expr: base(alpha.dot(&momentum_vec()).scale(k(Constant::C)))?,
            provenance: "c alpha.p",
            reference: "commutative Dirac Hamiltonian",
        },
        HamiltonianPiece {
            name: "vector-coupling",
            expr: base(alpha.dot(&vector_potential_atoms()).scale(-k(Constant::Charge)))?,
            provenance: "-e alpha.A, Gaussian units",
            reference: "commutative Dirac Hamiltonian",
        },
        HamiltonianPiece {
            name: "scalar-coupling",
            expr: base(OperatorExpr::term(k(Constant::Charge), vec![Atom::Phi]))?,
            provenance: "e Phi",
            reference: "commutative Dirac Hamiltonian",
        },
        HamiltonianPiece {
            name: "rest-mass",
            expr: base(OperatorExpr::term(k(Constant::Mass) * k(Constant::C).pow(2), vec![Atom::Beta]))?,
            provenance: "beta m c^2",
            reference: "commutative Dirac Hamiltonian",
        },
        HamiltonianPiece {
            name: "eta-term",
            expr: eta_term.clone(),
            provenance: "momentum Bopp shift of c alpha.p",
            reference: "phase-space deformed Hamiltonian, (alpha x r).eta term",
        },
        HamiltonianPiece {
            name: "theta-term",
            expr: theta_term.clone(),
            provenance: "space star product, d_b psi -> (i/hbar) p_b psi",
            reference: "phase-space deformed Hamiltonian, (grad(alpha.A - Phi) x p).Theta term",
        },
    ];

    let c_over_hbar = k(Constant::C) * p.hbar_inverse();
    let e_over_hbar = k(Constant::Charge) * p.hbar_inverse();
    let coefficients = vec![
        coefficient_note("eta-term", &eta_term, &canonicalize(&eta_structure(p), &ctx)?, c_over_hbar),
        coefficient_note("theta-term", &theta_term, &canonicalize(&theta_structure(p), &ctx)?, e_over_hbar),
    ];

    let dropped = shifted.len() - nc.len();
    let mut notes = vec![
        format!("conventions: {}", conv.describe()),
        "gradient coupling is grad(alpha.A - Phi): the star correction of -e alpha.A + e Phi; \
         the printed (alpha.A + Phi) of the intermediate step has the wrong sign on Phi"
            .to_string(),
        "static potentials: -(e/c) dA/dt is identically zero".to_string(),
    ];
    if dropped > 0 {
        notes.push(format!("{dropped} mixed Theta*eta term(s) dropped (first-order theory)"));
    }
    for c in &coefficients {
        let derived = c.derived.as_deref().unwrap_or("none");
        notes.push(format!(
            "{}: derived coefficient {derived} vs published {} on {}",
            c.term, c.reference, c.structure
        ));
    }
    if p.is_commutative() {
        notes.push("Theta = eta = 0: no deformation terms".to_string());
    }

    Ok(HamiltonianBundle {
        commutative,
        space_deformed,
        nc,
        pieces,
        coefficients,
        notes,
        field: field.clone(),
        params: p.clone(),
        conventions: *conv,
        star_order,
    })
}
