use num_traits::{One, Signed};

use super::atom::{Atom, FieldRef};
use super::expr::OperatorExpr;
use super::scalar::{Rational, ScalarCoeff};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Plain,
    Latex,
}

impl Format {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "plain" => Some(Format::Plain),
            "latex" => Some(Format::Latex),
            _ => None,
        }
    }
}

pub fn render(e: &OperatorExpr, format: Format) -> String {
    let mut out = String::new();
    for (k, t) in e.terms().enumerate() {
        let negative = t.coeff.is_negative();
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let magnitude = t.coeff.abs();
        let mut parts = coeff_parts(&magnitude, format);
        parts.extend(t.factors.iter().map(|a| match format {
            Format::Plain => a.to_string(),
            Format::Latex => atom_latex(*a),
        }));
        if parts.is_empty() {
            parts.push("1".into());
        }
        let sep = match format {
            Format::Plain => "*",
            Format::Latex => " ",
        };
        out.push_str(&parts.join(sep));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn render_plain(e: &OperatorExpr) -> String {
    render(e, Format::Plain)
}

pub fn render_latex(e: &OperatorExpr) -> String {
    render(e, Format::Latex)
}

/// Plain rendering of a lone coefficient, sign included.
pub fn render_coeff_plain(c: &ScalarCoeff) -> String {
    render(&OperatorExpr::scalar(*c), Format::Plain)
}

pub fn render_coeff_latex(c: &ScalarCoeff) -> String {
    render(&OperatorExpr::scalar(*c), Format::Latex)
}

/// Factors of a nonnegative coefficient; empty for exactly one.
fn coeff_parts(c: &ScalarCoeff, format: Format) -> Vec<String> {
    let mut parts = Vec::new();
    let r = c.rational_part();
    if !r.is_one() {
        parts.push(rational_string(r, format));
    }
    if c.is_imaginary() {
        parts.push("i".into());
    }
    for (k, exp) in c.consts().factors() {
        parts.push(match (format, exp) {
            (Format::Plain, 1) => k.name().to_string(),
            (Format::Plain, n) => format!("{}^{n}", k.name()),
            (Format::Latex, 1) => k.latex().to_string(),
            (Format::Latex, n) => format!("{}^{{{n}}}", k.latex()),
        });
    }
    parts
}

fn rational_string(r: Rational, format: Format) -> String {
    let r = r.abs();
    if r.is_integer() {
        return r.numer().to_string();
    }
    match format {
        Format::Plain => format!("{}/{}", r.numer(), r.denom()),
        Format::Latex => format!(r"\frac{{{}}}{{{}}}", r.numer(), r.denom()),
    }
}

pub fn atom_latex(a: Atom) -> String {
    match a {
        Atom::Position(i) => format!("x_{{{i}}}"),
        Atom::Momentum(i) => format!("p_{{{i}}}"),
        Atom::Phi => r"\Phi".into(),
        Atom::AField(i) => format!("A_{{{i}}}"),
        Atom::Partial { field, orders } => {
            let mut s = String::new();
            for (axis, &n) in orders.iter().enumerate() {
                for _ in 0..n {
                    s.push_str(&format!(r"\partial_{{{}}}", axis + 1));
                }
            }
            s.push_str(&match field {
                FieldRef::Phi => r"\Phi".to_string(),
                FieldRef::A(i) => format!("A_{{{i}}}"),
            });
            s
        }
        Atom::Alpha(i) => format!(r"\alpha_{{{i}}}"),
        Atom::Beta => r"\beta".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_ir::Constant;

    #[test]
    fn empty_expression_renders_zero() {
        assert_eq!(render_plain(&OperatorExpr::zero()), "0");
        assert_eq!(render_latex(&OperatorExpr::zero()), "0");
    }

    #[test]
    fn i_hbar() {
        let c = ScalarCoeff::i() * ScalarCoeff::constant(Constant::Hbar);
        assert_eq!(render_coeff_plain(&c), "i*hbar");
        assert_eq!(render_coeff_latex(&c), r"i \hbar");
    }

    #[test]
    fn signs_and_fractions() {
        let e = &OperatorExpr::term(ScalarCoeff::ratio(-1, 4) * ScalarCoeff::constant_pow(Constant::Hbar, -1), vec![Atom::Momentum(2)])
            + &OperatorExpr::atom(Atom::Position(1));
        assert_eq!(render_plain(&e), "x[1] - 1/4*hbar^-1*p[2]");
        assert_eq!(render_latex(&e), r"x_{1} - \frac{1}{4} \hbar^{-1} p_{2}");
    }
}
