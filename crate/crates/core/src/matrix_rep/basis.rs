use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator_ir::Constant;

use super::sparse::CsrMatrix;

/// Truncated spinor ⊗ oscillator basis. Spinor index is the most
/// significant, then axis 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FockBasisConfig {
    /// Number of represented spatial axes.
    pub dim: usize,
    /// Oscillator levels per axis.
    pub levels: usize,
    /// Scaffold oscillator frequency, sets the length scale `√(ħ/2mω)`.
    pub omega: f64,
    /// Top levels excluded from verification.
    pub guard: usize,
}

impl Default for FockBasisConfig {
    fn default() -> Self {
        FockBasisConfig {
            dim: 2,
            levels: 16,
            omega: 1.0,
            guard: 6,
        }
    }
}

impl FockBasisConfig {
    pub fn new(dim: usize, levels: usize, omega: f64, guard: usize) -> Result<Self> {
        let b = FockBasisConfig { dim, levels, omega, guard };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidBasis(format!("spatial dimension {} not in 1..=3", self.dim)));
        }
        if self.levels < 8 {
            return Err(Error::InvalidBasis(format!("need at least 8 levels per axis, got {}", self.levels)));
        }
        if self.guard == 0 || 2 * self.guard >= self.levels {
            return Err(Error::InvalidBasis(format!(
                "guard band {} must satisfy 0 < g < N/2 with N = {}",
                self.guard, self.levels
            )));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidBasis(format!("oscillator frequency {} must be positive", self.omega)));
        }
        Ok(())
    }

    pub fn spatial_dim(&self) -> usize {
        self.levels.pow(self.dim as u32)
    }

    pub fn total_dim(&self) -> usize {
        4 * self.spatial_dim()
    }

    /// Fock index on each axis (axis 1 first) of a basis state.
    pub fn occupation(&self, index: usize) -> Vec<usize> {
        let mut s = index % self.spatial_dim();
        let mut occ = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            occ[k] = s % self.levels;
            s /= self.levels;
        }
        occ
    }

    /// Basis states with every Fock index at most `N − g − 1`.
    pub fn guard_mask(&self) -> Vec<bool> {
        let limit = self.levels - self.guard;
        (0..self.total_dim())
            .map(|i| self.occupation(i).iter().all(|&n| n < limit))
            .collect()
    }

    /// Same basis with a different dimension.
    pub fn with_dim(&self, dim: usize) -> Self {
        FockBasisConfig { dim, ..*self }
    }

    /// Ladder operator `a` on one axis.
    pub(crate) fn lowering(&self) -> CsrMatrix {
        let n = self.levels;
        CsrMatrix::from_triplets(n, n, (1..n).map(|k| (k - 1, k, Complex64::new((k as f64).sqrt(), 0.0))))
    }
}

/// Numerical values for the symbolic constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantValues(BTreeMap<Constant, f64>);

impl ConstantValues {
    pub fn empty() -> Self {
        ConstantValues(BTreeMap::new())
    }

    /// `ħ = c = m = e = 1`, `B = 1`, `E = (0.1, 0, 0)`, `Θ = η = 0.01`.
    pub fn default_scenario() -> Self {
        use Constant::*;
        ConstantValues(BTreeMap::from([
            (Hbar, 1.0),
            (C, 1.0),
            (Mass, 1.0),
            (Charge, 1.0),
            (Theta, 0.01),
            (Eta, 0.01),
            (B, 1.0),
            (E1, 0.1),
            (E2, 0.0),
            (E3, 0.0),
        ]))
    }

    pub fn get(&self, c: Constant) -> Option<f64> {
        self.0.get(&c).copied()
    }

    pub fn set(&mut self, c: Constant, v: f64) {
        self.0.insert(c, v);
    }

    pub fn with(mut self, c: Constant, v: f64) -> Self {
        self.set(c, v);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (Constant, f64)> + '_ {
        self.0.iter().map(|(c, v)| (*c, *v))
    }

    pub(crate) fn require(&self, c: Constant) -> Result<f64> {
        self.get(c).ok_or(Error::UnboundConstant(c))
    }
}

impl Default for ConstantValues {
    fn default() -> Self {
        Self::default_scenario()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FockBasisConfig::new(2, 16, 1.0, 6).is_ok());
        assert!(FockBasisConfig::new(2, 6, 1.0, 2).is_err());
        assert!(FockBasisConfig::new(2, 16, 1.0, 8).is_err());
        assert!(FockBasisConfig::new(4, 16, 1.0, 6).is_err());
    }

    #[test]
    fn guard_mask_counts() {
        let b = FockBasisConfig::new(2, 16, 1.0, 6).unwrap();
        assert_eq!(b.total_dim(), 1024);
        assert_eq!(b.guard_mask().iter().filter(|&&k| k).count(), 4 * 10 * 10);
        assert_eq!(b.occupation(16 * 16 + 3 * 16 + 5), vec![3, 5]);
    }
}
