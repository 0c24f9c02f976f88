use std::fmt::{self, Write as _};

use serde::Serialize;
use serde_json::{json, Value};

use crate::dirac_model::{coupling_gradient, eta_structure, theta_structure, vector_potential_atoms, FieldSpec, HamiltonianBundle};
use crate::error::Result;
use crate::operator_ir::{
    alpha_vec, canonicalize, commutator, render_latex, render_plain, AlgebraContext, Atom, Constant, Expr, OperatorExpr,
    ScalarCoeff, Vec3Expr,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupTag {
    Velocity,
    Lambda,
    Electric,
    Magnetic,
    ThetaCorrection,
    EtaCorrection,
    Residue,
}

impl GroupTag {
    pub fn name(self) -> &'static str {
        match self {
            GroupTag::Velocity => "velocity",
            GroupTag::Lambda => "lambda",
            GroupTag::Electric => "electric",
            GroupTag::Magnetic => "magnetic",
            GroupTag::ThetaCorrection => "theta-correction",
            GroupTag::EtaCorrection => "eta-correction",
            GroupTag::Residue => "residue",
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One intermediate commutator of a derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub label: String,
    pub lhs: Expr,
    pub value: OperatorExpr,
    /// The published derivation states this commutator vanishes.
    pub declared_zero: bool,
}

impl TraceEntry {
    pub fn holds(&self) -> bool {
        !self.declared_zero || self.value.is_zero()
    }
}

/// A Heisenberg rate `dF_k/dt` for a vector observable, grouped by physical
/// origin, with the commutators used along the way.
#[derive(Debug, Clone)]
pub struct RateResult {
    pub observable: &'static str,
    /// Components with potentials kept as field atoms.
    pub components: Vec3Expr,
    /// Components with potentials expanded.
    pub expanded: Vec3Expr,
    /// Partition of `components` by origin.
    pub groups: Vec<(GroupTag, Vec3Expr)>,
    pub trace: Vec<TraceEntry>,
    pub field: FieldSpec,
}

impl RateResult {
    pub fn group(&self, tag: GroupTag) -> Vec3Expr {
        self.groups
            .iter()
            .find(|(t, _)| *t == tag)
            .map(|(_, v)| v.clone())
            .unwrap_or_default()
    }

    pub fn residue(&self) -> Vec3Expr {
        self.group(GroupTag::Residue)
    }

    pub fn expanded_group(&self, tag: GroupTag) -> Vec3Expr {
        let spec = &self.field;
        self.group(tag).map(|e| crate::operator_ir::symbol_normal_form(&spec.expand(e)))
    }

    pub fn to_json(&self) -> Value {
        let comp = |v: &Vec3Expr| v.iter().map(render_plain).collect::<Vec<_>>();
        json!({
            "observable": self.observable,
            "components": comp(&self.components),
            "components_latex": self.components.iter().map(render_latex).collect::<Vec<_>>(),
            "expanded": comp(&self.expanded),
            "groups": self.groups.iter().map(|(t, v)| json!({"tag": t, "components": comp(v)})).collect::<Vec<_>>(),
            "trace": self.trace.iter().map(|e| json!({
                "label": e.label,
                "value": render_plain(&e.value),
                "declared_zero": e.declared_zero,
                "holds": e.holds(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in self.components.iter().enumerate() {
            let _ = writeln!(s, "d{}{}/dt = {}", self.observable, k + 1, render_plain(c));
        }
        for (k, c) in self.expanded.iter().enumerate() {
            let _ = writeln!(s, "  expanded[{}] = {}", k + 1, render_plain(c));
        }
        let _ = writeln!(s, "groups:");
        for (tag, v) in &self.groups {
            let _ = writeln!(
                s,
                "  {:<17} ({})",
                tag.name(),
                v.iter().map(render_plain).collect::<Vec<_>>().join(", ")
            );
        }
        let _ = writeln!(s, "commutator trace:");
        for e in &self.trace {
            let mark = if e.declared_zero { " (declared zero)" } else { "" };
            let _ = writeln!(s, "  {} = {}{}", e.label, render_plain(&e.value), mark);
        }
        s
    }
}

/// `explicit_dt + (i/ħ)[H, F]`, canonicalized.
pub fn heisenberg_rate(f: &OperatorExpr, h: &OperatorExpr, explicit_dt: &OperatorExpr, ctx: &AlgebraContext) -> Result<OperatorExpr> {
    let i_over_hbar = ScalarCoeff::i() * ctx.params().hbar_inverse();
    canonicalize(&(explicit_dt + &commutator(h, f, ctx)?.scale(i_over_hbar)), ctx)
}

/// `D = p − (e/c)A` with potentials as field atoms.
pub fn kinetic_momentum_symbolic() -> Vec3Expr {
    let e_over_c = ScalarCoeff::constant(Constant::Charge) * ScalarCoeff::constant_pow(Constant::C, -1);
    Vec3Expr::from_fn(|k| &OperatorExpr::atom(Atom::Momentum(k)) - &OperatorExpr::atom(Atom::AField(k)).scale(e_over_c))
}

/// Canonical `D = p − (e/c)A` with the potentials expanded.
pub fn kinetic_momentum(field: &FieldSpec, ctx: &AlgebraContext) -> Result<Vec3Expr> {
    kinetic_momentum_symbolic().try_map(|d| canonicalize(&field.expand(d), ctx))
}

/// `E = −∇Φ` with derivative atoms.
pub fn electric_field_atoms() -> Vec3Expr {
    Vec3Expr::from_fn(|k| -OperatorExpr::atom(Atom::Phi.partial_of(k).expect("field atom")))
}

/// `Σ_i α_i (∂_k A_i − ∂_i A_k)`, the component form of `α × curl A`.
pub fn alpha_cross_curl_atoms() -> Vec3Expr {
    let alpha = alpha_vec();
    let d = |field: u8, axis: u8| OperatorExpr::atom(Atom::AField(field).partial_of(axis).expect("field atom"));
    Vec3Expr::from_fn(|k| {
        (1..=3u8).fold(OperatorExpr::zero(), |acc, i| acc + alpha.axis(i) * &(&d(i, k) - &d(k, i)))
    })
}

/// Splits each component into tagged groups: Θ-carrying terms, η-carrying
/// terms, terms found verbatim in one of the `expected` vectors, and the
/// rest.
fn partition(components: &Vec3Expr, theta_tag: GroupTag, expected: &[(GroupTag, Vec3Expr)]) -> Vec<(GroupTag, Vec3Expr)> {
    let mut tags: Vec<GroupTag> = expected.iter().map(|(t, _)| *t).collect();
    tags.extend([theta_tag, GroupTag::EtaCorrection, GroupTag::Residue]);
    let mut groups: Vec<(GroupTag, Vec3Expr)> = tags.iter().map(|&t| (t, Vec3Expr::zero())).collect();
    for (k, comp) in components.iter().enumerate() {
        for t in comp.terms() {
            let consts = t.coeff.consts();
            let tag = if consts.contains(Constant::Theta) {
                theta_tag
            } else if consts.contains(Constant::Eta) {
                GroupTag::EtaCorrection
            } else {
                expected
                    .iter()
                    .find(|(_, v)| v[k].terms().any(|q| q == t))
                    .map_or(GroupTag::Residue, |(tag, _)| *tag)
            };
            let slot = groups.iter_mut().find(|(g, _)| *g == tag).expect("tag registered");
            slot.1[k].add_term(t.coeff, t.factors);
        }
    }
    groups
}

fn entry(label: String, a: &OperatorExpr, b: &OperatorExpr, declared_zero: bool, ctx: &AlgebraContext) -> Result<TraceEntry> {
    Ok(TraceEntry {
        label,
        lhs: Expr::commutator(Expr::literal(a), Expr::literal(b)),
        value: commutator(a, b, ctx)?,
        declared_zero,
    })
}

fn rate_entry(label: String, h: &OperatorExpr, f: &OperatorExpr, value: &OperatorExpr, ctx: &AlgebraContext) -> TraceEntry {
    let i_over_hbar = ScalarCoeff::i() * ctx.params().hbar_inverse();
    TraceEntry {
        label,
        lhs: Expr::Mul(
            Box::new(Expr::literal(&OperatorExpr::scalar(i_over_hbar))),
            Box::new(Expr::commutator(Expr::literal(h), Expr::literal(f))),
        ),
        value: value.clone(),
        declared_zero: false,
    }
}

/// Operators appearing in `H_nc`, unscaled, for the commutator trace.
struct HamiltonianParts {
    alpha_p: OperatorExpr,
    alpha_a: OperatorExpr,
    eta_structure: OperatorExpr,
    theta_structure: OperatorExpr,
}

fn parts(bundle: &HamiltonianBundle) -> Result<HamiltonianParts> {
    let ctx = bundle.context();
    let alpha = alpha_vec();
    Ok(HamiltonianParts {
        alpha_p: canonicalize(&alpha.dot(&crate::operator_ir::momentum_vec()), &ctx)?,
        alpha_a: canonicalize(&alpha.dot(&vector_potential_atoms()), &ctx)?,
        eta_structure: canonicalize(&eta_structure(&bundle.params), &ctx)?,
        theta_structure: canonicalize(&theta_structure(&bundle.params), &ctx)?,
    })
}

/// `dx/dt = (i/ħ)[H_nc, x]`.
pub fn position_rate(bundle: &HamiltonianBundle) -> Result<RateResult> {
    let ctx = bundle.context();
    let h = &bundle.nc;
    let hp = parts(bundle)?;
    let mut components = Vec3Expr::zero();
    let mut trace = Vec::new();
    for k in 1..=3u8 {
        let x = OperatorExpr::atom(Atom::Position(k));
        let rate = heisenberg_rate(&x, h, &OperatorExpr::zero(), &ctx)?;
        trace.push(entry(format!("[alpha.p, x{k}]"), &hp.alpha_p, &x, false, &ctx)?);
        trace.push(entry(format!("[alpha.A, x{k}]"), &hp.alpha_a, &x, true, &ctx)?);
        trace.push(entry(format!("[Phi, x{k}]"), &OperatorExpr::atom(Atom::Phi), &x, true, &ctx)?);
        trace.push(entry(format!("[beta, x{k}]"), &OperatorExpr::atom(Atom::Beta), &x, true, &ctx)?);
        for i in 1..=3u8 {
            trace.push(entry(format!("[alpha{i}, x{k}]"), &OperatorExpr::atom(Atom::Alpha(i)), &x, true, &ctx)?);
        }
        trace.push(entry(format!("[(alpha x r).eta, x{k}]"), &hp.eta_structure, &x, true, &ctx)?);
        trace.push(entry(format!("[(grad(alpha.A - Phi) x p).Theta, x{k}]"), &hp.theta_structure, &x, false, &ctx)?);
        trace.push(entry(format!("[H_nc, x{k}]"), h, &x, false, &ctx)?);
        trace.push(rate_entry(format!("(i/hbar)[H_nc, x{k}]"), h, &x, &rate, &ctx));
        components[k as usize - 1] = rate;
    }
    let velocity = alpha_vec().scale(ScalarCoeff::constant(Constant::C));
    let groups = partition(&components, GroupTag::Lambda, &[(GroupTag::Velocity, velocity)]);
    let expanded = components.try_map(|c| canonicalize(&bundle.field.expand(c), &ctx))?;
    Ok(RateResult {
        observable: "x",
        components,
        expanded,
        groups,
        trace,
        field: bundle.field.clone(),
    })
}

/// `dD/dt = −(e/c)∂A/∂t + (i/ħ)[H_nc, D]` for static potentials.
pub fn kinetic_momentum_rate(bundle: &HamiltonianBundle) -> Result<RateResult> {
    let ctx = bundle.context();
    let h = &bundle.nc;
    let hp = parts(bundle)?;
    let d = kinetic_momentum_symbolic();
    let mut components = Vec3Expr::zero();
    let mut trace = Vec::new();
    let beta = OperatorExpr::atom(Atom::Beta);
    let phi = OperatorExpr::atom(Atom::Phi);
    for k in 1..=3u8 {
        let p = OperatorExpr::atom(Atom::Momentum(k));
        let a = OperatorExpr::atom(Atom::AField(k));
        // static potentials: the explicit time derivative vanishes
        let rate = heisenberg_rate(d.axis(k), h, &OperatorExpr::zero(), &ctx)?;
        trace.push(entry(format!("[alpha.p, p{k}]"), &hp.alpha_p, &p, true, &ctx)?);
        trace.push(entry(format!("[alpha.A, p{k}]"), &hp.alpha_a, &p, false, &ctx)?);
        trace.push(entry(format!("[Phi, p{k}]"), &phi, &p, false, &ctx)?);
        trace.push(entry(format!("[beta, p{k}]"), &beta, &p, true, &ctx)?);
        for i in 1..=3u8 {
            trace.push(entry(format!("[alpha{i}, p{k}]"), &OperatorExpr::atom(Atom::Alpha(i)), &p, true, &ctx)?);
        }
        trace.push(entry(format!("[(alpha x r).eta, p{k}]"), &hp.eta_structure, &p, false, &ctx)?);
        trace.push(entry(format!("[(grad(alpha.A - Phi) x p).Theta, p{k}]"), &hp.theta_structure, &p, false, &ctx)?);
        trace.push(entry(format!("[alpha.p, A{k}]"), &hp.alpha_p, &a, false, &ctx)?);
        trace.push(entry(format!("[alpha.A, A{k}]"), &hp.alpha_a, &a, true, &ctx)?);
        trace.push(entry(format!("[Phi, A{k}]"), &phi, &a, true, &ctx)?);
        trace.push(entry(format!("[beta, A{k}]"), &beta, &a, true, &ctx)?);
        for i in 1..=3u8 {
            trace.push(entry(format!("[alpha{i}, A{k}]"), &OperatorExpr::atom(Atom::Alpha(i)), &a, true, &ctx)?);
        }
        trace.push(entry(format!("[(alpha x r).eta, A{k}]"), &hp.eta_structure, &a, true, &ctx)?);
        trace.push(entry(format!("[(grad(alpha.A - Phi) x p).Theta, A{k}]"), &hp.theta_structure, &a, false, &ctx)?);
        trace.push(entry(format!("[H_nc, p{k}]"), h, &p, false, &ctx)?);
        trace.push(entry(format!("[H_nc, A{k}]"), h, &a, false, &ctx)?);
        trace.push(entry(format!("[H_nc, D{k}]"), h, d.axis(k), false, &ctx)?);
        trace.push(rate_entry(format!("(i/hbar)[H_nc, D{k}]"), h, d.axis(k), &rate, &ctx));
        components[k as usize - 1] = rate;
    }
    let charge = ScalarCoeff::constant(Constant::Charge);
    let electric = electric_field_atoms().try_map(|e| canonicalize(&e.scale(charge), &ctx))?;
    let magnetic = alpha_cross_curl_atoms().try_map(|e| canonicalize(&e.scale(charge), &ctx))?;
    let groups = partition(
        &components,
        GroupTag::ThetaCorrection,
        &[(GroupTag::Electric, electric), (GroupTag::Magnetic, magnetic)],
    );
    let expanded = components.try_map(|c| canonicalize(&bundle.field.expand(c), &ctx))?;
    Ok(RateResult {
        observable: "D",
        components,
        expanded,
        groups,
        trace,
        field: bundle.field.clone(),
    })
}

/// Sets Θ = η = 0 and drops the vanished terms and groups.
pub fn commutative_limit(r: &RateResult) -> RateResult {
    let limit = |v: &Vec3Expr| v.set_to_zero(Constant::Theta).set_to_zero(Constant::Eta);
    RateResult {
        observable: r.observable,
        components: limit(&r.components),
        expanded: limit(&r.expanded),
        groups: r
            .groups
            .iter()
            .map(|(t, v)| (*t, limit(v)))
            .collect(),
        trace: Vec::new(),
        field: r.field.clone(),
    }
}

/// Eigenvalue structure of the position rate on spinor components.
#[derive(Debug, Clone, Serialize)]
pub struct SpinorAction {
    /// Eigenvalues of each `α_i` in the Dirac representation.
    pub alpha_eigenvalues: [i32; 4],
    /// `c·(eigenvalues)` for each velocity component, rendered.
    pub velocity_eigenvalues: Vec<[String; 4]>,
    /// Λ with every `α_i` replaced by `+1`, then by `−1`.
    pub lambda_at_plus: Vec<String>,
    pub lambda_at_minus: Vec<String>,
}

/// Velocity group eigenvalues `±c` and the Λ shift with `α → ±1`.
pub fn spinor_component_action(r: &RateResult) -> SpinorAction {
    let alpha_eigenvalues = [-1, -1, 1, 1];
    let velocity = r.group(GroupTag::Velocity);
    let velocity_eigenvalues = velocity
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let c = v
                .ratio_to(&OperatorExpr::atom(Atom::Alpha(k as u8 + 1)))
                .unwrap_or_default();
            alpha_eigenvalues.map(|s| (c * ScalarCoeff::integer(s as i64)).to_string())
        })
        .collect();
    let lambda = r.expanded_group(GroupTag::Lambda);
    let at = |sign: i64| -> Vec<String> {
        lambda
            .iter()
            .map(|e| {
                let sub = e.substitute(|a| {
                    matches!(a, Atom::Alpha(_)).then(|| OperatorExpr::scalar(ScalarCoeff::integer(sign)))
                });
                render_plain(&crate::operator_ir::symbol_normal_form(&sub))
            })
            .collect()
    };
    SpinorAction {
        alpha_eigenvalues,
        velocity_eigenvalues,
        lambda_at_plus: at(1),
        lambda_at_minus: at(-1),
    }
}

/// `Λ = (eκ_Θ/(2ħ)) Θ⃗ × ∇(α·A − Φ)` shape helper: `Θ⃗ × G`.
pub fn theta_cross_gradient(theta: &Vec3Expr) -> Vec3Expr {
    theta.cross(&coupling_gradient())
}
