//! Symbolic operator expressions with exact coefficients.

mod atom;
mod canonical;
mod expr;
mod parse;
mod render;
mod scalar;

pub use atom::{Atom, FieldRef};
pub use canonical::{
    anticommutator, canonicalize, commutator, coordinate_derivative, differentiate, reduce_dirac, symbol_normal_form,
    AlgebraContext, AlgebraMode, MomentumRule,
};
pub use expr::{alpha_vec, axial_vec, momentum_vec, position_vec, OperatorExpr, Term, Vec3Expr};
pub use parse::{parse, parse_canonical, parse_expr, Expr};
pub use render::{atom_latex, render, render_coeff_latex, render_coeff_plain, render_latex, render_plain, Format};
pub use scalar::{Constant, Monomial, Rational, ScalarCoeff};
