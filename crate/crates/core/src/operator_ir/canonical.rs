//! Canonical ordering and commutator calculus.
//!
//! Spatial atoms are normal ordered by repeatedly swapping the first
//! out-of-order neighbours `u v -> v u + [u, v]`; Dirac matrices commute with
//! every spatial atom and are reduced separately with the anticommutation
//! rules to one of the sixteen ordered basis words.

use crate::dirac_model::FieldSpec;
use crate::error::{Error, Result};
use crate::nc_algebra::{bopp_shift, ConventionConfig, NCParameters};

use super::atom::Atom;
use super::expr::{OperatorExpr, Term};
use super::scalar::ScalarCoeff;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraMode {
    Commutative,
    NCSpace,
    NCPhaseSpace,
}

/// Base commutators between coordinates and momenta, indexed 0-based.
#[derive(Debug, Clone)]
struct BaseTable {
    xx: [[OperatorExpr; 3]; 3],
    pp: [[OperatorExpr; 3]; 3],
    xp: [[OperatorExpr; 3]; 3],
}

/// Everything canonicalization needs to know about the active algebra.
#[derive(Debug, Clone)]
pub struct AlgebraContext {
    mode: AlgebraMode,
    params: NCParameters,
    conventions: ConventionConfig,
    field: Option<FieldSpec>,
    table: BaseTable,
}

impl AlgebraContext {
    /// Builds the context. In the noncommutative modes the base table is the
    /// Bopp image of the canonical algebra, so `[x_a, x_b]`, `[p_a, p_b]` and
    /// `[x_a, p_b]` agree with the audit in [`crate::nc_algebra`].
    pub fn new(
        mode: AlgebraMode,
        params: NCParameters,
        conventions: ConventionConfig,
        field: Option<FieldSpec>,
    ) -> Self {
        let effective = match mode {
            AlgebraMode::Commutative => params.clone().with_theta(ScalarCoeff::zero()).with_eta(ScalarCoeff::zero()),
            AlgebraMode::NCSpace => params.clone().with_eta(ScalarCoeff::zero()),
            AlgebraMode::NCPhaseSpace => params.clone(),
        };
        let table = match mode {
            AlgebraMode::Commutative => canonical_table(&params),
            _ => bopp_table(&effective, &conventions),
        };
        AlgebraContext {
            mode,
            params: effective,
            conventions,
            field,
            table,
        }
    }

    /// Commutative algebra with symbolic ħ and no field information.
    pub fn commutative() -> Self {
        Self::new(
            AlgebraMode::Commutative,
            NCParameters::symbolic(),
            ConventionConfig::standard(),
            None,
        )
    }

    pub fn with_field(mut self, field: FieldSpec) -> Self {
        self.field = Some(field);
        self
    }

    pub fn mode(&self) -> AlgebraMode {
        self.mode
    }

    pub fn params(&self) -> &NCParameters {
        &self.params
    }

    pub fn conventions(&self) -> &ConventionConfig {
        &self.conventions
    }

    pub fn field(&self) -> Option<&FieldSpec> {
        self.field.as_ref()
    }

    fn i_hbar(&self) -> ScalarCoeff {
        ScalarCoeff::i() * self.params.hbar
    }

    /// `[u, v]` for two spatial atoms.
    fn base_commutator(&self, u: Atom, v: Atom) -> Result<OperatorExpr> {
        use Atom::*;
        let idx = |i: u8| i as usize - 1;
        Ok(match (u, v) {
            (Position(a), Position(b)) => self.table.xx[idx(a)][idx(b)].clone(),
            (Momentum(a), Momentum(b)) => self.table.pp[idx(a)][idx(b)].clone(),
            (Position(a), Momentum(b)) => self.table.xp[idx(a)][idx(b)].clone(),
            (Momentum(a), Position(b)) => -&self.table.xp[idx(b)][idx(a)],
            (f, g) if f.is_field() && g.is_field() => OperatorExpr::zero(),
            (f, Position(_)) | (Position(_), f) if f.is_field() => {
                if self.mode != AlgebraMode::Commutative {
                    return Err(Error::UnknownAtomPair { left: u, right: v });
                }
                OperatorExpr::zero()
            }
            (f, Momentum(j)) if f.is_field() => self.field_momentum(f, j, u, v)?,
            (Momentum(j), f) if f.is_field() => -self.field_momentum(f, j, u, v)?,
            _ => return Err(Error::UnknownAtomPair { left: u, right: v }),
        })
    }

    /// `[f, p_j] = iħ ∂_j f`, with the derivative resolved against the field
    /// specification.
    fn field_momentum(&self, f: Atom, j: u8, u: Atom, v: Atom) -> Result<OperatorExpr> {
        if self.mode != AlgebraMode::Commutative {
            return Err(Error::UnknownAtomPair { left: u, right: v });
        }
        let d = f.partial_of(j).ok_or(Error::InvalidAtom(f))?;
        if self.atom_vanishes(d) {
            return Ok(OperatorExpr::zero());
        }
        Ok(OperatorExpr::term(self.i_hbar(), vec![d]))
    }

    /// Field atoms whose polynomial (or derivative) is identically zero.
    fn atom_vanishes(&self, a: Atom) -> bool {
        match (a.field_parts(), &self.field) {
            (Some((field, orders)), Some(spec)) => spec.derivative_vanishes(field, orders),
            _ => false,
        }
    }
}

fn canonical_table(params: &NCParameters) -> BaseTable {
    let zero: [[OperatorExpr; 3]; 3] = Default::default();
    let mut xp = zero.clone();
    for (a, row) in xp.iter_mut().enumerate() {
        row[a] = OperatorExpr::scalar(ScalarCoeff::i() * params.hbar);
    }
    BaseTable {
        xx: zero.clone(),
        pp: zero,
        xp,
    }
}

fn bopp_table(params: &NCParameters, conv: &ConventionConfig) -> BaseTable {
    let base = AlgebraContext::new(AlgebraMode::Commutative, params.clone(), *conv, None);
    let image = |a: Atom| bopp_shift(&OperatorExpr::atom(a), params, conv).expect("coordinates always shift");
    let entry = |u: Atom, v: Atom| commutator(&image(u), &image(v), &base).expect("canonical algebra is closed");
    let mut table = canonical_table(params);
    for a in 1..=3u8 {
        for b in 1..=3u8 {
            let (i, j) = (a as usize - 1, b as usize - 1);
            table.xx[i][j] = entry(Atom::Position(a), Atom::Position(b));
            table.pp[i][j] = entry(Atom::Momentum(a), Atom::Momentum(b));
            table.xp[i][j] = entry(Atom::Position(a), Atom::Momentum(b));
        }
    }
    table
}

/// Sorts a word of Dirac matrices using `{α_i, α_j} = 2δ_ij`, `{α_i, β} = 0`,
/// `β² = 1`. Returns the sign and the reduced, strictly increasing word.
pub fn reduce_dirac(word: &[Atom]) -> (i64, Vec<Atom>) {
    let mut w = word.to_vec();
    let mut sign = 1;
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < w.len() {
            if w[i] == w[i + 1] {
                w.drain(i..i + 2);
                changed = true;
                continue;
            }
            if w[i] > w[i + 1] {
                w.swap(i, i + 1);
                sign = -sign;
                changed = true;
            }
            i += 1;
        }
        if !changed {
            return (sign, w);
        }
    }
}

fn validate(t: &Term) -> Result<()> {
    for &a in &t.factors {
        if !a.axes_valid() {
            return Err(Error::InvalidAtom(a));
        }
    }
    Ok(())
}

/// Canonical form of `e` under the algebra of `ctx`.
pub fn canonicalize(e: &OperatorExpr, ctx: &AlgebraContext) -> Result<OperatorExpr> {
    let mut out = OperatorExpr::zero();
    for t in e.terms() {
        validate(&t)?;
        if t.factors.iter().any(|&a| ctx.atom_vanishes(a)) {
            continue;
        }
        let (spinor, spatial): (Vec<Atom>, Vec<Atom>) = t.factors.iter().partition(|a| a.is_spinor());
        let (sign, spinor) = reduce_dirac(&spinor);
        let mut work = vec![(t.coeff * ScalarCoeff::integer(sign), spatial)];
        while let Some((c, word)) = work.pop() {
            match word.windows(2).position(|w| w[0] > w[1]) {
                None => {
                    let mut factors = word;
                    factors.extend_from_slice(&spinor);
                    out.add_term(c, factors);
                }
                Some(i) => {
                    let (u, v) = (word[i], word[i + 1]);
                    let bracket = ctx.base_commutator(u, v)?;
                    for b in bracket.terms() {
                        if b.factors.iter().any(|&a| ctx.atom_vanishes(a)) {
                            continue;
                        }
                        let mut w = word[..i].to_vec();
                        w.extend_from_slice(&b.factors);
                        w.extend_from_slice(&word[i + 2..]);
                        work.push((c * b.coeff, w));
                    }
                    let mut swapped = word;
                    swapped.swap(i, i + 1);
                    work.push((c, swapped));
                }
            }
        }
    }
    Ok(out)
}

/// Ordering for classical phase-space symbols: every spatial atom commutes,
/// Dirac matrices keep their algebra.
pub fn symbol_normal_form(e: &OperatorExpr) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for t in e.terms() {
        let (spinor, mut spatial): (Vec<Atom>, Vec<Atom>) = t.factors.iter().partition(|a| a.is_spinor());
        let (sign, spinor) = reduce_dirac(&spinor);
        spatial.sort();
        spatial.extend(spinor);
        out.add_term(t.coeff * ScalarCoeff::integer(sign), spatial);
    }
    out
}

pub fn commutator(a: &OperatorExpr, b: &OperatorExpr, ctx: &AlgebraContext) -> Result<OperatorExpr> {
    canonicalize(&(&(a * b) - &(b * a)), ctx)
}

pub fn anticommutator(a: &OperatorExpr, b: &OperatorExpr, ctx: &AlgebraContext) -> Result<OperatorExpr> {
    canonicalize(&(&(a * b) + &(b * a)), ctx)
}

/// How momenta are treated by a coordinate derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumRule {
    Reject,
    /// Momenta are independent of position, so ∂_j p = 0.
    Constant,
}

/// Formal `∂/∂x_axis` by the product rule. Field atoms become derivative
/// atoms; Dirac matrices are constant. The result is not canonicalized.
pub fn coordinate_derivative(e: &OperatorExpr, axis: u8, rule: MomentumRule) -> Result<OperatorExpr> {
    let mut out = OperatorExpr::zero();
    for t in e.terms() {
        for (k, &a) in t.factors.iter().enumerate() {
            let replacement = match a {
                Atom::Position(i) if i == axis => None,
                Atom::Position(_) | Atom::Alpha(_) | Atom::Beta => continue,
                Atom::Momentum(_) => match rule {
                    MomentumRule::Reject => return Err(Error::MomentumDerivative(a)),
                    MomentumRule::Constant => continue,
                },
                f => Some(f.partial_of(axis).ok_or(Error::InvalidAtom(f))?),
            };
            let mut factors = t.factors[..k].to_vec();
            factors.extend(replacement);
            factors.extend_from_slice(&t.factors[k + 1..]);
            out.add_term(t.coeff, factors);
        }
    }
    Ok(out)
}

/// `∂/∂x_axis` of an expression built from coordinates, fields and Dirac
/// matrices. Field atoms are resolved through the context's field
/// specification when one is present.
pub fn differentiate(e: &OperatorExpr, axis: u8, ctx: &AlgebraContext) -> Result<OperatorExpr> {
    if !(1..=3).contains(&axis) {
        return Err(Error::InvalidAtom(Atom::Position(axis)));
    }
    let d = coordinate_derivative(e, axis, MomentumRule::Reject)?;
    match ctx.field() {
        Some(spec) => canonicalize(&spec.expand(&d), ctx),
        None => canonicalize(&d, ctx),
    }
}
