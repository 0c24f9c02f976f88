use num_traits::One;

use crate::operator_ir::{axial_vec, Constant, Rational, ScalarCoeff, Vec3Expr};

/// Noncommutativity strengths and the Planck constant used by Bopp shifts.
///
/// Θ and η are exact scalars: the symbolic constants by default, or zero
/// for the commutative theory. Θ⃗ = (0, 0, Θ) and η⃗ = (0, 0, η).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCParameters {
    pub theta: ScalarCoeff,
    pub eta: ScalarCoeff,
    pub hbar: ScalarCoeff,
    pub a_scale: Rational,
    pub b_scale: Rational,
}

impl NCParameters {
    /// Symbolic Θ, η and ħ with unit scale factors.
    pub fn symbolic() -> Self {
        NCParameters {
            theta: ScalarCoeff::constant(Constant::Theta),
            eta: ScalarCoeff::constant(Constant::Eta),
            hbar: ScalarCoeff::constant(Constant::Hbar),
            a_scale: Rational::one(),
            b_scale: Rational::one(),
        }
    }

    pub fn commutative() -> Self {
        NCParameters {
            theta: ScalarCoeff::zero(),
            eta: ScalarCoeff::zero(),
            ..Self::symbolic()
        }
    }

    pub fn with_theta(mut self, theta: ScalarCoeff) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_eta(mut self, eta: ScalarCoeff) -> Self {
        self.eta = eta;
        self
    }

    /// Scale factors with `B = 1/A`.
    pub fn with_scale(mut self, a: Rational) -> Self {
        self.a_scale = a;
        self.b_scale = a.recip();
        self
    }

    pub fn is_commutative(&self) -> bool {
        self.theta.is_zero() && self.eta.is_zero()
    }

    pub fn theta_vec(&self) -> Vec3Expr {
        axial_vec(self.theta)
    }

    pub fn eta_vec(&self) -> Vec3Expr {
        axial_vec(self.eta)
    }

    /// Third component of Θ⃗ / η⃗ is the only nonzero one.
    pub fn theta_component(&self, l: u8) -> ScalarCoeff {
        if l == 3 {
            self.theta
        } else {
            ScalarCoeff::zero()
        }
    }

    pub fn eta_component(&self, l: u8) -> ScalarCoeff {
        if l == 3 {
            self.eta
        } else {
            ScalarCoeff::zero()
        }
    }

    pub fn hbar_inverse(&self) -> ScalarCoeff {
        self.hbar.inverse().expect("hbar must be nonzero")
    }
}

impl Default for NCParameters {
    fn default() -> Self {
        Self::symbolic()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoppDenominator {
    FourHbar,
    TwoHbar,
}

impl BoppDenominator {
    pub fn multiple(self) -> i64 {
        match self {
            BoppDenominator::FourHbar => 4,
            BoppDenominator::TwoHbar => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BoppDenominator::FourHbar => "4hbar",
            BoppDenominator::TwoHbar => "2hbar",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "4hbar" => Some(BoppDenominator::FourHbar),
            "2hbar" => Some(BoppDenominator::TwoHbar),
            _ => None,
        }
    }
}

/// Coefficient conventions left open by the source algebra: how the axial
/// vectors embed as antisymmetric matrices, and the Bopp-shift denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConventionConfig {
    pub theta_matrix_factor: Rational,
    pub eta_matrix_factor: Rational,
    pub bopp_denominator: BoppDenominator,
}

impl ConventionConfig {
    pub const NAMES: [&'static str; 2] = ["default", "unit"];

    /// κ = 1/2 with denominator 4ħ; reproduces `[x1, x2] = iΘ/2`.
    pub fn standard() -> Self {
        ConventionConfig {
            theta_matrix_factor: Rational::new(1, 2),
            eta_matrix_factor: Rational::new(1, 2),
            bopp_denominator: BoppDenominator::FourHbar,
        }
    }

    /// κ = 1 with denominator 2ħ; gives `[x1, x2] = iΘ`.
    pub fn unit() -> Self {
        ConventionConfig {
            theta_matrix_factor: Rational::one(),
            eta_matrix_factor: Rational::one(),
            bopp_denominator: BoppDenominator::TwoHbar,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::standard()),
            "unit" => Some(Self::unit()),
            _ => None,
        }
    }

    /// Θ_ab = κ_Θ ε_abl Θ_l as a 3x3 antisymmetric matrix (0-based indices).
    pub fn theta_matrix(&self, p: &NCParameters) -> [[ScalarCoeff; 3]; 3] {
        embed_axial(self.theta_matrix_factor, |l| p.theta_component(l))
    }

    pub fn eta_matrix(&self, p: &NCParameters) -> [[ScalarCoeff; 3]; 3] {
        embed_axial(self.eta_matrix_factor, |l| p.eta_component(l))
    }

    pub fn describe(&self) -> String {
        format!(
            "Theta_ab = {} eps_abl Theta_l, eta_ab = {} eps_abl eta_l, Bopp denominator {}",
            self.theta_matrix_factor,
            self.eta_matrix_factor,
            self.bopp_denominator.label()
        )
    }
}

impl Default for ConventionConfig {
    fn default() -> Self {
        Self::standard()
    }
}

fn embed_axial(kappa: Rational, component: impl Fn(u8) -> ScalarCoeff) -> [[ScalarCoeff; 3]; 3] {
    let mut m = [[ScalarCoeff::zero(); 3]; 3];
    for a in 1..=3u8 {
        for b in 1..=3u8 {
            let mut entry = ScalarCoeff::zero();
            for l in 1..=3u8 {
                let eps = levi_civita(a, b, l);
                if eps != 0 {
                    entry = component(l) * ScalarCoeff::rational(kappa * Rational::from_integer(eps));
                }
            }
            m[a as usize - 1][b as usize - 1] = entry;
        }
    }
    m
}

/// Levi-Civita symbol for 1-based indices.
pub fn levi_civita(i: u8, j: u8, k: u8) -> i64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_matrix_is_antisymmetric_block() {
        let m = ConventionConfig::standard().theta_matrix(&NCParameters::symbolic());
        let half_theta = ScalarCoeff::ratio(1, 2) * ScalarCoeff::constant(Constant::Theta);
        assert_eq!(m[0][1], half_theta);
        assert_eq!(m[1][0], -half_theta);
        for (a, row) in m.iter().enumerate() {
            assert!(row[a].is_zero());
            assert!(row[2].is_zero());
        }
    }

    #[test]
    fn scale_factors_are_reciprocal() {
        let p = NCParameters::symbolic().with_scale(Rational::new(3, 2));
        assert_eq!(p.a_scale * p.b_scale, Rational::one());
    }
}
