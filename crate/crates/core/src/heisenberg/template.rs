use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::dirac_model::{coupling_gradient, HamiltonianBundle};
use crate::error::{Error, Result};
use crate::operator_ir::{
    alpha_vec, canonicalize, commutator, parse_expr, render_coeff_plain, render_plain, AlgebraContext, Atom, Constant,
    OperatorExpr, ScalarCoeff, Vec3Expr,
};

use super::rate::{alpha_cross_curl_atoms, electric_field_atoms, GroupTag, RateResult};

/// One term of a printed equation: a fixed operator structure and the
/// coefficient it is printed with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateTerm {
    pub name: String,
    pub group: GroupTag,
    pub structure: Vec3Expr,
    pub coefficient: ScalarCoeff,
}

/// A printed rate equation as a list of coefficient slots over fixed
/// structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceTemplate {
    pub name: String,
    pub observable: &'static str,
    pub terms: Vec<TemplateTerm>,
}

impl ReferenceTemplate {
    pub fn empty(name: &str, observable: &'static str) -> Self {
        ReferenceTemplate {
            name: name.into(),
            observable,
            terms: Vec::new(),
        }
    }

    /// `Σ coefficient·structure`.
    pub fn expression(&self) -> Vec3Expr {
        self.terms
            .iter()
            .fold(Vec3Expr::zero(), |acc, t| &acc + &t.structure.scale(t.coefficient))
    }

    pub fn term_mut(&mut self, name: &str) -> Option<&mut TemplateTerm> {
        self.terms.iter_mut().find(|t| t.name == name)
    }
}

fn canonical(v: Vec3Expr, ctx: &AlgebraContext) -> Result<Vec3Expr> {
    v.try_map(|e| canonicalize(e, ctx))
}

fn c(x: Constant) -> ScalarCoeff {
    ScalarCoeff::constant(x)
}

fn inv(x: Constant) -> ScalarCoeff {
    ScalarCoeff::constant_pow(x, -1)
}

/// The six printed rate equations, with structures canonicalized under the
/// bundle's algebra.
pub fn reference_templates(bundle: &HamiltonianBundle) -> Result<Vec<ReferenceTemplate>> {
    let ctx = bundle.context();
    let p = &bundle.params;
    let i_over_hbar = ScalarCoeff::i() * p.hbar_inverse();
    let nabla = |j: u8| OperatorExpr::atom(Atom::Momentum(j)).scale(i_over_hbar);

    let velocity = canonical(alpha_vec(), &ctx)?;
    let theta_cross_g = canonical(p.theta_vec().cross(&coupling_gradient()), &ctx)?;
    let electric = canonical(electric_field_atoms(), &ctx)?;
    let v_cross_curl = canonical(alpha_cross_curl_atoms().scale(c(Constant::C)), &ctx)?;
    let eta_cross_alpha = canonical(p.eta_vec().cross(&alpha_vec()), &ctx)?;

    // Σ_i [(Θ×G)_i, ∇_j] ∇_i
    let gradient_commutator = Vec3Expr::try_from_fn(|j| {
        let mut acc = OperatorExpr::zero();
        for i in 1..=3u8 {
            acc += commutator(theta_cross_g.axis(i), &nabla(j), &ctx)? * nabla(i);
        }
        canonicalize(&acc, &ctx)
    })?;
    // Σ_i [r_i, ∇_j] (η×α)_i
    let eta_structure = Vec3Expr::try_from_fn(|j| {
        let mut acc = OperatorExpr::zero();
        for i in 1..=3u8 {
            acc += commutator(&OperatorExpr::atom(Atom::Position(i)), &nabla(j), &ctx)? * eta_cross_alpha.axis(i).clone();
        }
        canonicalize(&acc, &ctx)
    })?;
    // Σ_i (Θ×G)_i ∇_i A_j
    let field_structure = Vec3Expr::try_from_fn(|j| {
        let mut acc = OperatorExpr::zero();
        for i in 1..=3u8 {
            let grad_a = OperatorExpr::atom(Atom::AField(j).partial_of(i).expect("field atom"));
            acc += theta_cross_g.axis(i) * &grad_a;
        }
        canonicalize(&acc, &ctx)
    })?;

    let term = |name: &str, group, structure: &Vec3Expr, coefficient| TemplateTerm {
        name: name.into(),
        group,
        structure: structure.clone(),
        coefficient,
    };
    let minus_ie = -(ScalarCoeff::i() * c(Constant::Charge));
    let deformed_velocity = vec![
        term("velocity", GroupTag::Velocity, &velocity, c(Constant::C)),
        term("lambda", GroupTag::Lambda, &theta_cross_g, minus_ie),
    ];
    let lorentz = vec![
        term("electric", GroupTag::Electric, &electric, c(Constant::Charge)),
        term("magnetic", GroupTag::Magnetic, &v_cross_curl, c(Constant::Charge) * inv(Constant::C)),
    ];
    let mut deformed_lorentz = lorentz.clone();
    deformed_lorentz.extend([
        term(
            "theta-gradient",
            GroupTag::ThetaCorrection,
            &gradient_commutator,
            c(Constant::Charge) * inv(Constant::Hbar),
        ),
        term("eta", GroupTag::EtaCorrection, &eta_structure, c(Constant::C) * inv(Constant::Hbar)),
        term(
            "theta-field",
            GroupTag::ThetaCorrection,
            &field_structure,
            -(c(Constant::Charge) * c(Constant::Charge) * inv(Constant::C) * inv(Constant::Hbar)),
        ),
    ]);
    let named = |name: &str, observable, terms| ReferenceTemplate {
        name: name.into(),
        observable,
        terms,
    };
    Ok(vec![
        named("velocity-deformed", "x", deformed_velocity.clone()),
        named("velocity-spinor", "x", deformed_velocity),
        named(
            "velocity-classical",
            "x",
            vec![term("velocity", GroupTag::Velocity, &velocity, c(Constant::C))],
        ),
        named("lorentz-curl", "D", deformed_lorentz.clone()),
        named("lorentz-deformed", "D", deformed_lorentz),
        named("lorentz-classical", "D", lorentz),
    ])
}

/// Replaces printed coefficients. Keys are `template/term`, values scalar
/// expressions such as `-e` or `1/4*c*hbar^-1`.
pub fn apply_overrides(templates: &mut [ReferenceTemplate], overrides: &BTreeMap<String, String>) -> Result<()> {
    for (key, value) in overrides {
        let bad = |message: String| Error::Config {
            path: format!("reference_overrides.{key}"),
            message,
        };
        let (tname, term) = key
            .split_once('/')
            .ok_or_else(|| bad("expected key of the form template/term".into()))?;
        let template = templates
            .iter_mut()
            .find(|t| t.name == tname)
            .ok_or_else(|| bad(format!("unknown template '{tname}'")))?;
        let slot = template
            .term_mut(term)
            .ok_or_else(|| bad(format!("template '{tname}' has no term '{term}'")))?;
        let e = parse_expr(value).map_err(|e| bad(e.to_string()))?;
        let coeff = match e.as_scalar() {
            Some(s) if e.len() <= 1 => s,
            _ => return Err(bad(format!("'{value}' is not a single scalar monomial"))),
        };
        slot.coefficient = coeff;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Match,
    Mismatch,
    /// The structure vanishes identically for the active fields.
    Vacuous,
    OnlyTemplate,
    OnlyDerived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyRow {
    pub term: String,
    pub group: GroupTag,
    pub structure: Vec<String>,
    pub derived: Option<String>,
    pub paper: Option<String>,
    pub ratio: Option<String>,
    pub status: RowStatus,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub template: String,
    pub rows: Vec<DiscrepancyRow>,
}

impl DiscrepancyReport {
    pub fn row(&self, term: &str) -> Option<&DiscrepancyRow> {
        self.rows.iter().find(|r| r.term == term)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &DiscrepancyRow> {
        self.rows.iter().filter(|r| !r.matches)
    }

    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("template {}\n", self.template);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  {:<16} {:<17} derived={:<24} reference={:<20} ratio={:<16} {}",
                r.term,
                r.group.name(),
                r.derived.as_deref().unwrap_or("-"),
                r.paper.as_deref().unwrap_or("-"),
                r.ratio.as_deref().unwrap_or("-"),
                match r.status {
                    RowStatus::Match => "match",
                    RowStatus::Mismatch => "MISMATCH",
                    RowStatus::Vacuous => "vacuous",
                    RowStatus::OnlyTemplate => "MISSING-IN-DERIVED",
                    RowStatus::OnlyDerived => "MISSING-IN-TEMPLATE",
                }
            );
        }
        s
    }
}

/// `λ` with `λ·s ⊆ d` term by term, taken from candidates that line up with
/// the first term of `s`.
fn fit(d: &Vec3Expr, s: &Vec3Expr) -> Option<ScalarCoeff> {
    let (k, lead) = s.iter().enumerate().find_map(|(k, e)| e.terms().next().map(|t| (k, t)))?;
    d[k].terms()
        .filter(|t| t.factors == lead.factors)
        .filter_map(|t| t.coeff.div(&lead.coeff))
        .find(|&lambda| {
            s.iter()
                .zip(d.iter())
                .all(|(se, de)| se.scale(lambda).terms().all(|t| de.terms().any(|q| q == t)))
        })
}

fn render_vec(v: &Vec3Expr) -> Vec<String> {
    v.iter().map(render_plain).collect()
}

/// Fits each template coefficient against the matching derived group and
/// reports exact ratios. Terms found on one side only become rows.
pub fn compare_with_template(r: &RateResult, t: &ReferenceTemplate) -> DiscrepancyReport {
    let mut remaining: Vec<(GroupTag, Vec3Expr)> = r.groups.clone();
    let mut rows = Vec::new();
    for term in &t.terms {
        let slot = match remaining.iter_mut().find(|(g, _)| *g == term.group) {
            Some((_, v)) => v,
            None => {
                remaining.push((term.group, Vec3Expr::zero()));
                &mut remaining.last_mut().expect("just pushed").1
            }
        };
        let paper = Some(render_coeff_plain(&term.coefficient));
        let structure = render_vec(&term.structure);
        if term.structure.is_zero() {
            rows.push(DiscrepancyRow {
                term: term.name.clone(),
                group: term.group,
                structure,
                derived: None,
                paper,
                ratio: None,
                status: RowStatus::Vacuous,
                matches: true,
            });
            continue;
        }
        match fit(slot, &term.structure) {
            Some(lambda) => {
                *slot = &*slot - &term.structure.scale(lambda);
                let ratio = lambda.div(&term.coefficient);
                let matches = lambda == term.coefficient;
                rows.push(DiscrepancyRow {
                    term: term.name.clone(),
                    group: term.group,
                    structure,
                    derived: Some(render_coeff_plain(&lambda)),
                    paper,
                    ratio: ratio.map(|q| render_coeff_plain(&q)),
                    status: if matches { RowStatus::Match } else { RowStatus::Mismatch },
                    matches,
                });
            }
            None => rows.push(DiscrepancyRow {
                term: term.name.clone(),
                group: term.group,
                structure,
                derived: None,
                paper,
                ratio: None,
                status: RowStatus::OnlyTemplate,
                matches: false,
            }),
        }
    }
    for (group, v) in remaining {
        if !v.is_zero() {
            rows.push(DiscrepancyRow {
                term: format!("unmatched-{}", group.name()),
                group,
                structure: render_vec(&v),
                derived: Some("1".into()),
                paper: None,
                ratio: None,
                status: RowStatus::OnlyDerived,
                matches: false,
            });
        }
    }
    DiscrepancyReport {
        template: t.name.clone(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac_model::{deformed_hamiltonian, FieldSpec};
    use crate::heisenberg::{commutative_limit, kinetic_momentum_rate, position_rate};
    use crate::nc_algebra::{ConventionConfig, NCParameters};

    fn setup(p: NCParameters) -> (HamiltonianBundle, Vec<ReferenceTemplate>) {
        let b = deformed_hamiltonian(&FieldSpec::symbolic(), &p, &ConventionConfig::standard(), 1).unwrap();
        let t = reference_templates(&b).unwrap();
        (b, t)
    }

    fn by_name<'a>(t: &'a [ReferenceTemplate], name: &str) -> &'a ReferenceTemplate {
        t.iter().find(|x| x.name == name).unwrap()
    }

    #[test]
    fn classical_lorentz_template_matches_limit() {
        let (b, t) = setup(NCParameters::symbolic());
        let r = commutative_limit(&kinetic_momentum_rate(&b).unwrap());
        let rep = compare_with_template(&r, by_name(&t, "lorentz-classical"));
        assert!(rep.all_match(), "{}", rep.to_text());
        assert_eq!(rep.rows.len(), 2);
    }

    #[test]
    fn lambda_slot_is_flagged() {
        let (b, t) = setup(NCParameters::symbolic());
        let r = position_rate(&b).unwrap();
        let rep = compare_with_template(&r, by_name(&t, "velocity-deformed"));
        assert!(rep.row("velocity").unwrap().matches);
        let lambda = rep.row("lambda").unwrap();
        assert_eq!(lambda.status, RowStatus::Mismatch, "{}", rep.to_text());
        assert_eq!(lambda.derived.as_deref(), Some("1/4*hbar^-1*e"));
        assert_eq!(rep.rows.len(), 2);
    }

    #[test]
    fn deformed_lorentz_report() {
        let (b, t) = setup(NCParameters::symbolic());
        let r = kinetic_momentum_rate(&b).unwrap();
        let rep = compare_with_template(&r, by_name(&t, "lorentz-deformed"));
        assert!(rep.row("electric").unwrap().matches);
        assert!(rep.row("magnetic").unwrap().matches);
        assert_eq!(rep.row("theta-gradient").unwrap().status, RowStatus::Vacuous);
        let eta = rep.row("eta").unwrap();
        assert_eq!(eta.status, RowStatus::Mismatch, "{}", rep.to_text());
        assert_eq!(eta.ratio.as_deref(), Some("1/4"));
        let field = rep.row("theta-field").unwrap();
        assert_eq!(field.status, RowStatus::Mismatch, "{}", rep.to_text());
        assert_eq!(field.ratio.as_deref(), Some("1/4"));
        assert!(!rep.rows.iter().any(|r| r.status == RowStatus::OnlyDerived), "{}", rep.to_text());
    }

    #[test]
    fn empty_template_against_zero_rate() {
        let (b, _) = setup(NCParameters::commutative());
        let mut r = position_rate(&b).unwrap();
        for (_, v) in r.groups.iter_mut() {
            *v = Vec3Expr::zero();
        }
        let rep = compare_with_template(&r, &ReferenceTemplate::empty("none", "x"));
        assert!(rep.rows.is_empty());
    }

    #[test]
    fn tampered_electric_slot() {
        let (b, mut t) = setup(NCParameters::commutative());
        let overrides = BTreeMap::from([("lorentz-classical/electric".to_string(), "-e".to_string())]);
        apply_overrides(&mut t, &overrides).unwrap();
        let r = commutative_limit(&kinetic_momentum_rate(&b).unwrap());
        let rep = compare_with_template(&r, by_name(&t, "lorentz-classical"));
        assert_eq!(rep.row("electric").unwrap().ratio.as_deref(), Some("-1"));
        let bad = BTreeMap::from([("nope/electric".to_string(), "e".to_string())]);
        assert!(matches!(apply_overrides(&mut t, &bad), Err(Error::Config { .. })));
    }
}
