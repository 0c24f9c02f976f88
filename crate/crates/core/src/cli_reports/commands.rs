use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dirac_model::{deformed_hamiltonian, HamiltonianBundle};
use crate::error::{Error, Result};
use crate::heisenberg::{
    apply_overrides, commutative_limit, compare_with_template, kinetic_momentum_rate, kinetic_momentum_symbolic,
    position_rate, reference_templates, spinor_component_action, DiscrepancyReport, GroupTag, RateResult,
    ReferenceTemplate,
};
use crate::matrix_rep::{
    convergence, ehrenfest_residual, evolve, gaussian_packet, hermiticity_residual, identity_residual, CsrMatrix,
    Realizer, SpectralDecomposition,
};
use crate::nc_algebra::algebra_consistency_report;
use crate::operator_ir::{
    alpha_vec, canonicalize, commutator, render_latex, render_plain, symbol_normal_form, Atom, Constant, Expr,
    OperatorExpr, ScalarCoeff, Vec3Expr,
};

use super::config::RunConfig;

/// What a subcommand produced: a verdict, a human summary, a JSON summary
/// and the files written.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub pass: bool,
    pub text: String,
    pub json: Value,
    pub files: Vec<PathBuf>,
}

/// Everything derived symbolically from one configuration.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub bundle: HamiltonianBundle,
    pub position: RateResult,
    pub momentum: RateResult,
    pub templates: Vec<ReferenceTemplate>,
}

impl Derivation {
    pub fn template(&self, name: &str) -> &ReferenceTemplate {
        self.templates
            .iter()
            .find(|t| t.name == name)
            .expect("built-in template name")
    }

    /// Reports for every template of the rate's observable.
    pub fn discrepancies(&self, r: &RateResult) -> Vec<DiscrepancyReport> {
        self.templates
            .iter()
            .filter(|t| t.observable == r.observable)
            .map(|t| compare_with_template(r, t))
            .collect()
    }
}

pub fn derive(cfg: &RunConfig) -> Result<Derivation> {
    let bundle = deformed_hamiltonian(
        &cfg.field_spec()?,
        &cfg.parameters()?,
        &cfg.conventions()?,
        cfg.star_order as u32,
    )?;
    let position = position_rate(&bundle)?;
    let momentum = kinetic_momentum_rate(&bundle)?;
    let mut templates = reference_templates(&bundle)?;
    apply_overrides(&mut templates, &cfg.reference_overrides)?;
    Ok(Derivation {
        bundle,
        position,
        momentum,
        templates,
    })
}

fn write_file(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeriveTarget {
    Hamiltonian,
    PositionRate,
    MomentumRate,
}

impl DeriveTarget {
    pub const NAMES: [&'static str; 3] = ["hamiltonian", "position-rate", "momentum-rate"];

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "hamiltonian" => Some(DeriveTarget::Hamiltonian),
            "position-rate" => Some(DeriveTarget::PositionRate),
            "momentum-rate" => Some(DeriveTarget::MomentumRate),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DeriveTarget::Hamiltonian => "hamiltonian",
            DeriveTarget::PositionRate => "position-rate",
            DeriveTarget::MomentumRate => "momentum-rate",
        }
    }
}

fn rate_is_clean(r: &RateResult) -> bool {
    r.residue().is_zero() && r.trace.iter().all(|e| e.holds())
}

/// Writes plain and LaTeX renderings, the commutator trace and the
/// template comparisons for one derivation target.
pub fn cmd_derive(target: DeriveTarget, cfg: &RunConfig) -> Result<CommandOutcome> {
    let d = derive(cfg)?;
    let dir = cfg.output_dir();
    let mut files = Vec::new();
    let name = target.name();
    let (pass, text, json) = match target {
        DeriveTarget::Hamiltonian => {
            let b = &d.bundle;
            let mut text = String::new();
            let _ = writeln!(text, "conventions: {}", b.conventions.describe());
            let _ = writeln!(text, "H          = {}", render_plain(&b.commutative));
            let _ = writeln!(text, "H_nc       = {}", render_plain(&b.nc));
            let _ = writeln!(text, "H_nc latex = {}", render_latex(&b.nc));
            let _ = writeln!(text, "H_nc (potentials expanded) = {}", render_plain(&b.expanded_nc()?));
            let _ = writeln!(text, "pieces:");
            for p in &b.pieces {
                let _ = writeln!(text, "  {:<16} {}  [{}]", p.name, render_plain(&p.expr), p.provenance);
            }
            let _ = writeln!(text, "deformation coefficients:");
            for c in &b.coefficients {
                let _ = writeln!(
                    text,
                    "  {:<10} derived={} reference={} {}",
                    c.term,
                    c.derived.as_deref().unwrap_or("-"),
                    c.reference,
                    if c.matches { "match" } else { "MISMATCH" }
                );
            }
            for n in &b.notes {
                let _ = writeln!(text, "note: {n}");
            }
            let mut json = b.to_json();
            json["H_nc_latex"] = Value::String(render_latex(&b.nc));
            (true, text, json)
        }
        DeriveTarget::PositionRate | DeriveTarget::MomentumRate => {
            let r = if target == DeriveTarget::PositionRate {
                &d.position
            } else {
                &d.momentum
            };
            let reports = d.discrepancies(r);
            let mut text = r.to_text();
            for rep in &reports {
                text.push_str(&rep.to_text());
            }
            let mut json = json!({
                "rate": r.to_json(),
                "discrepancies": reports,
            });
            if target == DeriveTarget::PositionRate {
                let action = spinor_component_action(r);
                let _ = writeln!(
                    text,
                    "spinor components: velocity eigenvalues {:?}; Lambda at alpha=+1 {:?}, at alpha=-1 {:?}",
                    action.velocity_eigenvalues, action.lambda_at_plus, action.lambda_at_minus
                );
                json["spinor_action"] = serde_json::to_value(&action)?;
            }
            if !r.residue().is_zero() {
                text.push_str("residue group is not empty\n");
            }
            (rate_is_clean(r), text, json)
        }
    };
    write_file(dir, &format!("{name}.txt"), &text, &mut files)?;
    write_file(dir, &format!("{name}.json"), &pretty(&json), &mut files)?;
    Ok(CommandOutcome { pass, text, json, files })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// One numerical identity to verify: label, both sides, tolerance.
struct IdentityCase {
    label: String,
    lhs: Expr,
    rhs: Expr,
    tolerance: f64,
}

fn identity_cases(d: &Derivation, cfg: &RunConfig) -> Vec<IdentityCase> {
    let t = &cfg.tolerances;
    let mut cases = Vec::new();
    for (obs, r) in [("x", &d.position), ("D", &d.momentum)] {
        for e in &r.trace {
            cases.push(IdentityCase {
                label: format!("{obs}: {}", e.label),
                lhs: e.lhs.clone(),
                rhs: Expr::literal(&e.value),
                tolerance: if e.declared_zero { t.zero_identity } else { t.identity },
            });
        }
    }
    cases
}

/// Internal consistency: symbolic audit, identity residuals of every
/// traced commutator, Hermiticity. Coefficient mismatches against the
/// printed forms are findings and do not fail the run.
pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutcome> {
    let d = derive(cfg)?;
    let t = &cfg.tolerances;
    let values = cfg.values()?;
    let mut checks: Vec<CheckOutcome> = Vec::new();

    let symbolic = |name: &str, ok: bool| CheckOutcome {
        name: name.into(),
        kind: "symbolic",
        residual: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        pass: ok,
    };
    checks.push(symbolic("position-rate residue empty", d.position.residue().is_zero()));
    checks.push(symbolic("momentum-rate residue empty", d.momentum.residue().is_zero()));
    checks.push(symbolic(
        "declared-zero commutators vanish",
        d.position.trace.iter().chain(&d.momentum.trace).all(|e| e.holds()),
    ));
    let ctx = d.bundle.context();
    checks.push(symbolic(
        "energy conservation [H_nc, H_nc] = 0",
        commutator(&d.bundle.nc, &d.bundle.nc, &ctx)?.is_zero(),
    ));

    let verifier = Realizer::new(cfg.verify_basis, values.clone(), d.bundle.field.clone())?;
    let numeric: Vec<Result<CheckOutcome>> = identity_cases(&d, cfg)
        .par_iter()
        .map(|c| {
            let rep = identity_residual(&c.label, &c.lhs, &c.rhs, &verifier, c.tolerance)?;
            Ok(CheckOutcome {
                name: rep.identity,
                kind: "identity",
                residual: rep.residual,
                tolerance: rep.tolerance,
                pass: rep.pass,
            })
        })
        .collect();
    for c in numeric {
        checks.push(c?);
    }

    let realizer = Realizer::new(cfg.basis, values, d.bundle.field.clone())?;
    let mut hermitian: Vec<(String, OperatorExpr)> = vec![("hermiticity H_nc".into(), d.bundle.nc.clone())];
    for k in 1..=realizer.basis().dim as u8 {
        hermitian.push((format!("hermiticity D{k}"), kinetic_momentum_symbolic().axis(k).clone()));
    }
    let herm: Vec<Result<CheckOutcome>> = hermitian
        .par_iter()
        .map(|(name, e)| {
            let residual = hermiticity_residual(&realizer.realize(e)?);
            Ok(CheckOutcome {
                name: name.clone(),
                kind: "hermiticity",
                residual,
                tolerance: t.hermiticity,
                pass: residual <= t.hermiticity,
            })
        })
        .collect();
    for c in herm {
        checks.push(c?);
    }

    let audit = algebra_consistency_report(&d.bundle.params, &d.bundle.conventions)?;
    let mut findings: Vec<Value> = audit
        .mismatches()
        .map(|r| json!({"source": "algebra", "relation": r.relation, "derived": r.derived, "paper": r.paper}))
        .collect();
    for c in d.bundle.coefficients.iter().filter(|c| !c.matches) {
        findings.push(json!({"source": "hamiltonian", "term": c.term, "derived": c.derived, "paper": c.reference}));
    }
    for r in [&d.position, &d.momentum] {
        for rep in d.discrepancies(r) {
            for row in rep.flagged() {
                findings.push(json!({
                    "source": rep.template,
                    "term": row.term,
                    "status": row.status,
                    "derived": row.derived,
                    "paper": row.paper,
                    "ratio": row.ratio,
                }));
            }
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    for c in &checks {
        if !c.pass || c.kind != "identity" {
            let _ = writeln!(
                text,
                "{} {:<12} {:<60} residual={:.3e} tol={:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.kind,
                c.name,
                c.residual,
                c.tolerance
            );
        }
    }
    let identities: Vec<&CheckOutcome> = checks.iter().filter(|c| c.kind == "identity").collect();
    let worst = identities.iter().map(|c| c.residual).fold(0.0, f64::max);
    let _ = writeln!(
        text,
        "identity checks: {}/{} pass, worst residual {:.3e}",
        identities.iter().filter(|c| c.pass).count(),
        identities.len(),
        worst
    );
    let _ = writeln!(text, "findings (reported, not failures): {}", findings.len());
    for f in &findings {
        let _ = writeln!(text, "  {f}");
    }
    let _ = writeln!(text, "{}", if pass { "verify: PASS" } else { "verify: FAIL" });
    let json = json!({
        "pass": pass,
        "checks": checks,
        "findings": findings,
        "algebra": audit,
    });
    let mut files = Vec::new();
    write_file(cfg.output_dir(), "verify.json", &pretty(&json), &mut files)?;
    write_file(cfg.output_dir(), "algebra.csv", &audit.to_csv()?, &mut files)?;
    Ok(CommandOutcome { pass, text, json, files })
}

/// Observables recorded along an evolution, by column name.
pub fn evolution_observables(d: &Derivation, realizer: &Realizer) -> Result<Vec<(String, CsrMatrix)>> {
    let dim = realizer.basis().dim as u8;
    let dk = kinetic_momentum_symbolic();
    let mut obs = Vec::new();
    for k in 1..=dim {
        let i = k as usize - 1;
        obs.push((format!("x{k}"), realizer.realize(&OperatorExpr::atom(Atom::Position(k)))?));
        obs.push((format!("v{k}"), realizer.realize(&d.position.components[i])?));
        obs.push((format!("D{k}"), realizer.realize(dk.axis(k))?));
        obs.push((format!("F{k}"), realizer.realize(&d.momentum.components[i])?));
    }
    let c = ScalarCoeff::constant(Constant::C);
    for k in 1..=3u8 {
        obs.push((format!("c_alpha{k}"), realizer.realize(&alpha_vec().axis(k).scale(c))?));
    }
    obs.push(("H".into(), realizer.realize(&d.bundle.nc)?));
    Ok(obs)
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionSummary {
    pub checks: Vec<CheckOutcome>,
    pub convergence: Vec<crate::matrix_rep::ConvergenceCheck>,
    pub pass: bool,
}

/// Residual below which a convergence ratio is meaningless (round-off).
const CONVERGENCE_FLOOR: f64 = 1e-11;

/// Evolves the configured packet, writes the trajectory CSV and the
/// Ehrenfest residual JSON.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<CommandOutcome> {
    if cfg.basis.dim > 2 {
        return Err(Error::Config {
            path: "basis.dim".into(),
            message: "evolution uses dense matrices and supports at most two axes".into(),
        });
    }
    let d = derive(cfg)?;
    let values = cfg.values()?;
    let hbar = values.require(Constant::Hbar)?;
    let c = values.require(Constant::C)?;
    let realizer = Realizer::new(cfg.basis, values, d.bundle.field.clone())?;
    let obs = evolution_observables(&d, &realizer)?;
    let h = &obs.last().expect("H is recorded").1;
    let spectrum = SpectralDecomposition::new(h)?;
    let ev = &cfg.evolution;
    let psi0 = gaussian_packet(&realizer, &ev.x0, &ev.p0, ev.spinor())?;
    let t = &cfg.tolerances;
    let traj = evolve(&spectrum, &psi0, hbar, ev.dt, ev.steps, &obs);

    let mut checks = Vec::new();
    let dim = realizer.basis().dim;
    let pairs: Vec<(String, String)> = (1..=dim)
        .flat_map(|k| [(format!("x{k}"), format!("v{k}")), (format!("D{k}"), format!("F{k}"))])
        .collect();
    let mut series = Vec::new();
    for (base, rhs) in &pairs {
        let s = ehrenfest_residual(&traj, base, rhs)?;
        checks.push(CheckOutcome {
            name: format!("d<{base}>/dt = <{rhs}>"),
            kind: "ehrenfest",
            residual: s.max,
            tolerance: t.ehrenfest,
            pass: s.max <= t.ehrenfest,
        });
        series.push(s);
    }
    let norm_drift = traj.max_norm_drift();
    checks.push(CheckOutcome {
        name: "norm drift".into(),
        kind: "unitarity",
        residual: norm_drift,
        tolerance: t.norm_drift,
        pass: norm_drift <= t.norm_drift,
    });
    let energy_drift = traj.max_drift("H")?;
    checks.push(CheckOutcome {
        name: "<H> drift".into(),
        kind: "energy",
        residual: energy_drift,
        tolerance: t.energy_drift,
        pass: energy_drift <= t.energy_drift,
    });
    for k in 1..=3 {
        let name = format!("c_alpha{k}");
        let excess = traj.column(&name)?.iter().map(|v| v.abs() - c).fold(f64::NEG_INFINITY, f64::max);
        checks.push(CheckOutcome {
            name: format!("|<{name}>| <= c"),
            kind: "bound",
            residual: excess.max(0.0),
            tolerance: 0.0,
            pass: excess <= 1e-12 * c,
        });
    }

    let mut conv = Vec::new();
    if ev.convergence {
        let fine = evolve(&spectrum, &psi0, hbar, ev.dt / 2.0, ev.steps * 2, &obs);
        for ((base, rhs), coarse) in pairs.iter().zip(&series) {
            let f = ehrenfest_residual(&fine, base, rhs)?;
            let mut check = convergence(&format!("d<{base}>/dt = <{rhs}>"), coarse, &f, ev.convergence_window);
            if coarse.max < CONVERGENCE_FLOOR {
                check.pass = true;
            }
            conv.push(check);
        }
    }
    let pass = checks.iter().all(|c| c.pass) && conv.iter().all(|c| c.pass);
    let summary = EvolutionSummary {
        checks,
        convergence: conv,
        pass,
    };
    let mut text = String::new();
    for c in &summary.checks {
        let _ = writeln!(
            text,
            "{} {:<10} {:<28} residual={:.3e} tol={:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.kind,
            c.name,
            c.residual,
            c.tolerance
        );
    }
    for c in &summary.convergence {
        let _ = writeln!(
            text,
            "{} convergence {:<28} dt={:.3e} -> {:.3e}, dt/2 -> {:.3e}, ratio {:.4} in [{}, {}]",
            if c.pass { "PASS" } else { "FAIL" },
            c.identity,
            ev.dt,
            c.coarse,
            c.fine,
            c.ratio,
            c.window[0],
            c.window[1]
        );
    }
    let _ = writeln!(text, "{}", if pass { "evolve: PASS" } else { "evolve: FAIL" });
    let json = json!({
        "pass": pass,
        "dt": ev.dt,
        "steps": ev.steps,
        "residuals": summary.checks.iter().map(|c| json!({
            "identity": c.name, "residual": c.residual, "tolerance": c.tolerance, "pass": c.pass,
        })).collect::<Vec<_>>(),
        "convergence": summary.convergence,
    });
    let mut files = Vec::new();
    write_file(cfg.output_dir(), "trajectory.csv", &traj.to_csv(), &mut files)?;
    write_file(cfg.output_dir(), "ehrenfest.json", &pretty(&json), &mut files)?;
    Ok(CommandOutcome { pass, text, json, files })
}

/// One limit comparison with its symbolic and expanded difference.
#[derive(Debug, Clone, Serialize)]
pub struct LimitCheck {
    pub name: String,
    pub template: String,
    pub derived: Vec<String>,
    pub reference: Vec<String>,
    pub delta: Vec<String>,
    pub delta_expanded: Vec<String>,
    pub pass: bool,
}

fn limit_check(name: &str, r: &RateResult, t: &ReferenceTemplate, d: &Derivation) -> Result<LimitCheck> {
    let ctx = d.bundle.context();
    let limit = commutative_limit(r);
    let reference = t.expression().try_map(|e| canonicalize(e, &ctx))?;
    let delta: Vec3Expr = (&limit.components - &reference).try_map(|e| canonicalize(e, &ctx))?;
    let expanded = delta.map(|e| symbol_normal_form(&d.bundle.field.expand(e)));
    let text = |v: &Vec3Expr| v.iter().map(render_plain).collect::<Vec<_>>();
    Ok(LimitCheck {
        name: name.into(),
        template: t.name.clone(),
        derived: text(&limit.components),
        reference: text(&reference),
        delta: text(&delta),
        delta_expanded: text(&expanded),
        pass: delta.is_zero(),
    })
}

/// Θ, η → 0 limits of both rates against the classical reference forms.
pub fn cmd_limits(cfg: &RunConfig) -> Result<CommandOutcome> {
    let d = derive(cfg)?;
    let checks = vec![
        limit_check("position rate", &d.position, d.template("velocity-classical"), &d)?,
        limit_check("kinetic momentum rate", &d.momentum, d.template("lorentz-classical"), &d)?,
    ];
    let pass = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(text, "{} {} vs {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.template);
        let _ = writeln!(text, "  derived   = ({})", c.derived.join(", "));
        let _ = writeln!(text, "  reference = ({})", c.reference.join(", "));
        if !c.pass {
            let _ = writeln!(text, "  delta     = ({})", c.delta.join(", "));
            let _ = writeln!(text, "  delta (potentials expanded) = ({})", c.delta_expanded.join(", "));
        }
    }
    let groups: Vec<Value> = [&d.position, &d.momentum]
        .iter()
        .map(|r| {
            let l = commutative_limit(r);
            json!({
                "observable": r.observable,
                "groups": l.groups.iter().filter(|(_, v)| !v.is_zero()).map(|(t, _)| *t).collect::<Vec<GroupTag>>(),
            })
        })
        .collect();
    let json = json!({"pass": pass, "checks": checks, "limit_groups": groups});
    let mut files = Vec::new();
    write_file(cfg.output_dir(), "limits.json", &pretty(&json), &mut files)?;
    Ok(CommandOutcome { pass, text, json, files })
}
