use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator_ir::{
    commutator, render_plain, Atom, AlgebraContext, AlgebraMode, OperatorExpr, ScalarCoeff,
};

use super::bopp::bopp_shift;
use super::params::{levi_civita, ConventionConfig, NCParameters};

/// `ξ = Tr[Θη] / (4ABħ²)` and `ħ̃ = ħ(AB + ξ)` for the embedded matrices.
pub fn effective_planck(
    p: &NCParameters,
    theta: &[[ScalarCoeff; 3]; 3],
    eta: &[[ScalarCoeff; 3]; 3],
) -> (OperatorExpr, OperatorExpr) {
    let mut trace = OperatorExpr::zero();
    for a in 0..3 {
        for b in 0..3 {
            trace += OperatorExpr::scalar(theta[a][b] * eta[b][a]);
        }
    }
    let ab = ScalarCoeff::rational(p.a_scale * p.b_scale);
    let denom = ScalarCoeff::integer(4) * ab * p.hbar * p.hbar;
    let xi = trace.scale(denom.inverse().expect("nonzero scale and hbar"));
    let hbar_eff = (&OperatorExpr::scalar(ab) + &xi).scale(p.hbar);
    (xi, hbar_eff)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyRow {
    pub relation: String,
    pub derived: String,
    pub paper: String,
    #[serde(rename = "match")]
    pub matches: bool,
    #[serde(skip)]
    pub derived_expr: OperatorExpr,
    #[serde(skip)]
    pub reference_expr: OperatorExpr,
}

/// Relation-by-relation comparison of the Bopp-derived algebra against the
/// published coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub embedding: String,
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    pub fn row(&self, relation: &str) -> Option<&ConsistencyRow> {
        self.rows.iter().find(|r| r.relation == relation)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ConsistencyRow> {
        self.rows.iter().filter(|r| !r.matches)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io("<memory>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# embedding: {}\n", self.embedding);
        let w0 = self.rows.iter().map(|r| r.relation.len()).max().unwrap_or(8).max(8);
        let w1 = self.rows.iter().map(|r| r.derived.len()).max().unwrap_or(7).max(7);
        let w2 = self.rows.iter().map(|r| r.paper.len()).max().unwrap_or(9).max(9);
        let _ = writeln!(s, "{:w0$}  {:w1$}  {:w2$}  match", "relation", "derived", "reference");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:w0$}  {:w1$}  {:w2$}  {}",
                r.relation,
                r.derived,
                r.paper,
                if r.matches { "yes" } else { "NO" }
            );
        }
        s
    }
}

fn row(relation: String, derived: OperatorExpr, reference: OperatorExpr) -> ConsistencyRow {
    ConsistencyRow {
        relation,
        derived: render_plain(&derived),
        paper: render_plain(&reference),
        matches: derived == reference,
        derived_expr: derived,
        reference_expr: reference,
    }
}

/// Published values: `[x_j, x_k] = (i/2) ε_jkl Θ_l`, `[p_j, p_k] = (i/2) ε_jkl η_l`,
/// `[x_j, p_k] = iħ(1 + Θη/(4ħ²)) δ_jk`, and `ξ = Θη/(4ħ²)`.
fn reference_value(kind: (char, char), j: u8, k: u8, p: &NCParameters) -> OperatorExpr {
    let half_i = ScalarCoeff::ratio(1, 2) * ScalarCoeff::i();
    let eps_sum = |comp: &dyn Fn(u8) -> ScalarCoeff| {
        (1..=3u8).fold(OperatorExpr::zero(), |acc, l| {
            acc + OperatorExpr::scalar(half_i * ScalarCoeff::integer(levi_civita(j, k, l)) * comp(l))
        })
    };
    match kind {
        ('x', 'x') => eps_sum(&|l| p.theta_component(l)),
        ('p', 'p') => eps_sum(&|l| p.eta_component(l)),
        _ if j == k => (&OperatorExpr::one() + &reference_xi(p)).scale(ScalarCoeff::i() * p.hbar),
        _ => OperatorExpr::zero(),
    }
}

fn reference_xi(p: &NCParameters) -> OperatorExpr {
    let inv = (ScalarCoeff::integer(4) * p.hbar * p.hbar).inverse().expect("nonzero hbar");
    OperatorExpr::scalar(p.theta * p.eta * inv)
}

/// Expands all nine coordinate/momentum commutators of the shifted
/// variables over the canonical algebra, plus ξ.
pub fn algebra_consistency_report(p: &NCParameters, conv: &ConventionConfig) -> Result<ConsistencyReport> {
    let ctx = AlgebraContext::new(AlgebraMode::Commutative, p.clone(), *conv, None);
    let shifted = |a: Atom| bopp_shift(&OperatorExpr::atom(a), p, conv);
    let mut rows = Vec::new();
    let pairs: [((char, char), fn(u8) -> Atom, fn(u8) -> Atom, bool); 3] = [
        (('x', 'x'), Atom::Position, Atom::Position, true),
        (('p', 'p'), Atom::Momentum, Atom::Momentum, true),
        (('x', 'p'), Atom::Position, Atom::Momentum, false),
    ];
    for (kind, left, right, upper) in pairs {
        for j in 1..=3u8 {
            let ks: Vec<u8> = if upper { (j + 1..=3).collect() } else { vec![j] };
            for k in ks {
                let derived = commutator(&shifted(left(j))?, &shifted(right(k))?, &ctx)?;
                rows.push(row(
                    format!("[{}{j},{}{k}]", kind.0, kind.1),
                    derived,
                    reference_value(kind, j, k, p),
                ));
            }
        }
    }
    let (xi, _) = effective_planck(p, &conv.theta_matrix(p), &conv.eta_matrix(p));
    rows.push(row("xi".into(), xi, reference_xi(p)));
    Ok(ConsistencyReport {
        embedding: conv.describe(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_ir::Constant;

    #[test]
    fn commutative_parameters_match_everywhere() {
        let r = algebra_consistency_report(&NCParameters::commutative(), &ConventionConfig::standard()).unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!(r.rows.iter().all(|row| row.matches), "{}", r.to_text());
    }

    #[test]
    fn xi_from_block_embedding() {
        let p = NCParameters::symbolic();
        let conv = ConventionConfig::standard();
        let (xi, hbar_eff) = effective_planck(&p, &conv.theta_matrix(&p), &conv.eta_matrix(&p));
        let expected = ScalarCoeff::ratio(-1, 8)
            * ScalarCoeff::monomial(&[Constant::Theta, Constant::Eta])
            * ScalarCoeff::constant_pow(Constant::Hbar, -2);
        assert_eq!(xi, OperatorExpr::scalar(expected));
        assert_eq!(hbar_eff, (&OperatorExpr::one() + &xi).scale(p.hbar));
    }

    #[test]
    fn csv_has_four_columns() {
        let r = algebra_consistency_report(&NCParameters::symbolic(), &ConventionConfig::standard()).unwrap();
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("relation,derived,paper,match\n"));
        assert_eq!(csv.lines().count(), 11);
    }
}
