use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::dirac_model::FieldSpec;
use crate::error::{Error, Result};
use crate::operator_ir::{AlgebraContext, Atom, Constant, Expr, OperatorExpr, ScalarCoeff};

use super::basis::{ConstantValues, FockBasisConfig};
use super::sparse::CsrMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn pauli(i: u8) -> [[Complex64; 2]; 2] {
    match i {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        _ => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// `α_i = offdiag(σ_i, σ_i)`.
pub fn dirac_alpha(i: u8) -> CsrMatrix {
    let s = pauli(i);
    let mut t = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            t.push((r, c + 2, s[r][c]));
            t.push((r + 2, c, s[r][c]));
        }
    }
    CsrMatrix::from_triplets(4, 4, t)
}

/// `β = diag(1, 1, −1, −1)`.
pub fn dirac_beta() -> CsrMatrix {
    CsrMatrix::diagonal(&[ONE, ONE, -ONE, -ONE])
}

/// Maps operator expressions to sparse matrices on a truncated basis.
///
/// Momenta along axes outside the basis act as zero (a state with no
/// transverse motion); positions along such axes are rejected unless
/// their coefficient evaluates to zero.
#[derive(Debug, Clone)]
pub struct Realizer {
    basis: FockBasisConfig,
    values: ConstantValues,
    field: FieldSpec,
    atoms: HashMap<Atom, CsrMatrix>,
}

#[derive(Debug, Clone)]
enum Realized {
    Scalar(Complex64),
    Matrix(CsrMatrix),
}

impl Realizer {
    pub fn new(basis: FockBasisConfig, values: ConstantValues, field: FieldSpec) -> Result<Self> {
        basis.validate()?;
        let hbar = values.require(Constant::Hbar)?;
        let mass = values.require(Constant::Mass)?;
        let spin_id = CsrMatrix::identity(4);
        let n = basis.levels;
        let a = basis.lowering();
        let ad = a.adjoint();
        let x_scale = (hbar / (2.0 * mass * basis.omega)).sqrt();
        let p_scale = (mass * hbar * basis.omega / 2.0).sqrt();
        let x1 = a.add(&ad).scale(Complex64::new(x_scale, 0.0));
        let p1 = ad.sub(&a).scale(Complex64::new(0.0, p_scale));
        let embed = |spin: &CsrMatrix, axis: Option<(usize, &CsrMatrix)>| {
            let mut m = spin.clone();
            for k in 0..basis.dim {
                m = match axis {
                    Some((j, op)) if j == k => m.kron(op),
                    _ => m.kron(&CsrMatrix::identity(n)),
                };
            }
            m
        };
        let mut atoms = HashMap::new();
        for k in 0..basis.dim {
            atoms.insert(Atom::Position(k as u8 + 1), embed(&spin_id, Some((k, &x1))));
            atoms.insert(Atom::Momentum(k as u8 + 1), embed(&spin_id, Some((k, &p1))));
        }
        for i in 1..=3 {
            atoms.insert(Atom::Alpha(i), embed(&dirac_alpha(i), None));
        }
        atoms.insert(Atom::Beta, embed(&dirac_beta(), None));
        Ok(Realizer {
            basis,
            values,
            field,
            atoms,
        })
    }

    pub fn basis(&self) -> &FockBasisConfig {
        &self.basis
    }

    pub fn values(&self) -> &ConstantValues {
        &self.values
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        self.basis.total_dim()
    }

    pub fn identity(&self) -> CsrMatrix {
        CsrMatrix::identity(self.dimension())
    }

    pub fn coefficient(&self, c: &ScalarCoeff) -> Result<Complex64> {
        c.evaluate(|k| self.values.get(k)).map_err(Error::UnboundConstant)
    }

    /// Product of atoms in written order, or `None` when a transverse
    /// momentum makes it vanish.
    fn product(&self, factors: &[Atom]) -> Result<Option<CsrMatrix>> {
        let mut acc: Option<CsrMatrix> = None;
        for a in factors {
            let m = match self.atoms.get(a) {
                Some(m) => m,
                None => match a {
                    Atom::Momentum(k) if (1..=3).contains(k) => return Ok(None),
                    Atom::Position(_) => {
                        return Err(Error::AxisOutOfRange {
                            atom: *a,
                            dim: self.basis.dim,
                        })
                    }
                    _ => return Err(Error::InvalidAtom(*a)),
                },
            };
            acc = Some(match acc {
                None => m.clone(),
                Some(p) => p.matmul(m),
            });
        }
        Ok(Some(acc.unwrap_or_else(|| self.identity())))
    }

    /// Realizes a sum of products; potentials are expanded first.
    pub fn realize(&self, e: &OperatorExpr) -> Result<CsrMatrix> {
        let expanded = self.field.expand(e);
        let mut total = CsrMatrix::zeros(self.dimension(), self.dimension());
        for t in expanded.terms() {
            let c = self.coefficient(&t.coeff)?;
            if c == ZERO {
                continue;
            }
            if let Some(m) = self.product(&t.factors)? {
                total = total.axpby(ONE, &m, c);
            }
        }
        Ok(total)
    }

    /// Realizes an expression tree, evaluating brackets as matrix
    /// commutators rather than symbolically.
    pub fn realize_tree(&self, e: &Expr) -> Result<CsrMatrix> {
        Ok(match self.tree(e)? {
            Realized::Scalar(s) => self.identity().scale(s),
            Realized::Matrix(m) => m,
        })
    }

    fn tree(&self, e: &Expr) -> Result<Realized> {
        use Realized::*;
        Ok(match e {
            Expr::Number(r) => Scalar(Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)),
            Expr::Imaginary => Scalar(I),
            Expr::Constant(c) => Scalar(Complex64::new(self.values.require(*c)?, 0.0)),
            Expr::Atom(a) => Matrix(self.realize(&OperatorExpr::atom(*a))?),
            Expr::Neg(x) => match self.tree(x)? {
                Scalar(s) => Scalar(-s),
                Matrix(m) => Matrix(m.scale(-ONE)),
            },
            Expr::Add(a, b) => self.sum(self.tree(a)?, self.tree(b)?, ONE),
            Expr::Sub(a, b) => self.sum(self.tree(a)?, self.tree(b)?, -ONE),
            Expr::Mul(a, b) => Self::mul(self.tree(a)?, self.tree(b)?),
            Expr::Pow(base, n) => match self.tree(base)? {
                Scalar(s) => Scalar(s.powi(*n)),
                Matrix(m) if *n >= 0 => {
                    (0..*n).fold(Matrix(self.identity()), |acc, _| Self::mul(acc, Matrix(m.clone())))
                }
                Matrix(_) => return Err(Error::NonPolynomial("negative power of an operator".into())),
            },
            Expr::Commutator(a, b) => match (self.tree(a)?, self.tree(b)?) {
                (Matrix(x), Matrix(y)) => Matrix(x.commutator(&y)),
                _ => Scalar(ZERO),
            },
            Expr::Anticommutator(a, b) => {
                let (x, y) = (self.tree(a)?, self.tree(b)?);
                self.sum(Self::mul(x.clone(), y.clone()), Self::mul(y, x), ONE)
            }
            Expr::Partial(..) => {
                let ctx = AlgebraContext::commutative().with_field(self.field.clone());
                Matrix(self.realize(&e.eval(&ctx)?)?)
            }
        })
    }

    fn sum(&self, a: Realized, b: Realized, sign: Complex64) -> Realized {
        use Realized::*;
        match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(x + sign * y),
            (Matrix(m), Scalar(y)) => Matrix(m.axpby(ONE, &self.identity(), sign * y)),
            (Scalar(x), Matrix(m)) => Matrix(self.identity().axpby(x, &m, sign)),
            (Matrix(m), Matrix(n)) => Matrix(m.axpby(ONE, &n, sign)),
        }
    }

    fn mul(a: Realized, b: Realized) -> Realized {
        use Realized::*;
        match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(x * y),
            (Matrix(m), Scalar(s)) | (Scalar(s), Matrix(m)) => Matrix(m.scale(s)),
            (Matrix(m), Matrix(n)) => Matrix(m.matmul(&n)),
        }
    }
}

/// `realize` without keeping the realizer around.
pub fn realize(e: &OperatorExpr, basis: FockBasisConfig, values: &ConstantValues, field: &FieldSpec) -> Result<CsrMatrix> {
    Realizer::new(basis, values.clone(), field.clone())?.realize(e)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub identity: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `‖P(L − R)P‖ / max(1, ‖P R P‖)` on the guarded subspace.
///
/// The numerator uses the Frobenius norm and the denominator a power
/// iteration estimate, so the reported value never understates the
/// spectral-norm ratio.
pub fn identity_residual(
    identity: &str,
    lhs: &Expr,
    rhs: &Expr,
    realizer: &Realizer,
    tolerance: f64,
) -> Result<ResidualReport> {
    let mask = realizer.basis().guard_mask();
    let l = realizer.realize_tree(lhs)?;
    let r = realizer.realize_tree(rhs)?;
    let r_p = r.restrict(&mask);
    let diff = l.sub(&r).restrict(&mask).frobenius_norm();
    let scale = r_p.spectral_norm_estimate(60).max(1.0);
    let residual = diff / scale;
    Ok(ResidualReport {
        identity: identity.into(),
        residual,
        tolerance,
        pass: residual <= tolerance,
    })
}

/// `‖M − M†‖ / max(1, ‖M‖)`, same bounding as `identity_residual`.
pub fn hermiticity_residual(m: &CsrMatrix) -> f64 {
    m.sub(&m.adjoint()).frobenius_norm() / m.spectral_norm_estimate(60).max(1.0)
}
