//! Moyal star product on classical phase-space symbols.
//!
//! Symbols are polynomials in commuting `x` and `p`; Dirac matrices keep
//! their relative order, left factor first. The product is the full
//! bidifferential exponential
//! `exp[(i/2) Θ_ab ∂x_a ⊗ ∂x_b + (i/2) η_ab ∂p_a ⊗ ∂p_b]`, expanded order by
//! order; it is associative, and every order beyond the polynomial degree
//! vanishes exactly.

use crate::error::{Error, Result};
use crate::operator_ir::{symbol_normal_form, Atom, OperatorExpr, Rational, ScalarCoeff};

use super::params::{ConventionConfig, NCParameters};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarSector {
    /// Coordinates only: `exp[(i/2) Θ_ab ∂x_a ∂x_b]`.
    Space,
    /// Coordinates and momenta.
    PhaseSpace,
}

impl StarSector {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "space" => Some(StarSector::Space),
            "phase_space" | "phase-space" => Some(StarSector::PhaseSpace),
            _ => None,
        }
    }
}

/// Partial derivative of a classical symbol with respect to one variable.
pub fn symbol_derivative(e: &OperatorExpr, var: Atom) -> Result<OperatorExpr> {
    let mut out = OperatorExpr::zero();
    for t in e.terms() {
        if let Some(f) = t.factors.iter().find(|a| a.is_field()) {
            return Err(Error::NonPolynomial(format!(
                "field atom {f} in a star-product argument; expand fields first"
            )));
        }
        for (k, &a) in t.factors.iter().enumerate() {
            if a != var {
                continue;
            }
            let mut factors = t.factors[..k].to_vec();
            factors.extend_from_slice(&t.factors[k + 1..]);
            out.add_term(t.coeff, factors);
        }
    }
    Ok(symbol_normal_form(&out))
}

/// Nonzero entries `(ω_ab, variable a, variable b)` of the Poisson-type
/// bivector for the sector.
fn bivector(sector: StarSector, p: &NCParameters, conv: &ConventionConfig) -> Vec<(ScalarCoeff, Atom, Atom)> {
    let mut out = Vec::new();
    let mut push = |m: [[ScalarCoeff; 3]; 3], var: fn(u8) -> Atom| {
        for a in 0..3 {
            for b in 0..3 {
                if !m[a][b].is_zero() {
                    out.push((m[a][b], var(a as u8 + 1), var(b as u8 + 1)));
                }
            }
        }
    };
    push(conv.theta_matrix(p), Atom::Position);
    if sector == StarSector::PhaseSpace {
        push(conv.eta_matrix(p), Atom::Momentum);
    }
    out
}

/// The order-`n` term `(1/n!) (i/2)^n ω^{a1b1}…ω^{anbn} ∂_{a…}F ∂_{b…}G`.
pub fn star_order_term(
    f: &OperatorExpr,
    g: &OperatorExpr,
    n: u32,
    sector: StarSector,
    p: &NCParameters,
    conv: &ConventionConfig,
) -> Result<OperatorExpr> {
    let omega = bivector(sector, p, conv);
    let mut pairs = vec![(ScalarCoeff::one(), symbol_normal_form(f), symbol_normal_form(g))];
    for _ in 0..n {
        let mut next = Vec::new();
        for (c, left, right) in &pairs {
            for &(w, a, b) in &omega {
                let dl = symbol_derivative(left, a)?;
                if dl.is_zero() {
                    continue;
                }
                let dr = symbol_derivative(right, b)?;
                if dr.is_zero() {
                    continue;
                }
                next.push((*c * w, dl, dr));
            }
        }
        if next.is_empty() {
            return Ok(OperatorExpr::zero());
        }
        pairs = next;
    }
    let factorial: i64 = (1..=n as i64).product();
    let prefactor = (ScalarCoeff::ratio(1, 2) * ScalarCoeff::i()).pow(n)
        * ScalarCoeff::rational(Rational::new(1, factorial));
    let mut out = OperatorExpr::zero();
    for (c, left, right) in pairs {
        out += (&left * &right).scale(c * prefactor);
    }
    Ok(symbol_normal_form(&out))
}

/// `F ⋆ G` through `max_order` in the deformation.
pub fn star_product(
    f: &OperatorExpr,
    g: &OperatorExpr,
    max_order: u32,
    sector: StarSector,
    p: &NCParameters,
    conv: &ConventionConfig,
) -> Result<OperatorExpr> {
    let mut out = OperatorExpr::zero();
    for n in 0..=max_order {
        out += star_order_term(f, g, n, sector, p, conv)?;
    }
    Ok(out)
}

/// Largest number of spatial factors in any term.
pub fn polynomial_degree(e: &OperatorExpr) -> usize {
    e.terms()
        .map(|t| t.factors.iter().filter(|a| !a.is_spinor()).count())
        .max()
        .unwrap_or(0)
}

/// `F ⋆ G − G ⋆ F` through `max_order`.
pub fn moyal_bracket(
    f: &OperatorExpr,
    g: &OperatorExpr,
    max_order: u32,
    sector: StarSector,
    p: &NCParameters,
    conv: &ConventionConfig,
) -> Result<OperatorExpr> {
    Ok(&star_product(f, g, max_order, sector, p, conv)? - &star_product(g, f, max_order, sector, p, conv)?)
}
