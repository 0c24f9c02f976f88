use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac_model::FieldSpec;
use crate::error::{Error, Result};
use crate::matrix_rep::{ConstantValues, FockBasisConfig};
use crate::nc_algebra::{ConventionConfig, NCParameters};
use crate::operator_ir::{parse_expr, Constant, OperatorExpr, Rational, ScalarCoeff};

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Potentials as expression strings in `x[1..3]` and constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub vector_potential: [String; 3],
    pub scalar_potential: String,
}

impl Default for FieldConfig {
    /// Symmetric gauge `A = (−Bx₂/2, Bx₁/2, 0)` with uniform `E`.
    fn default() -> Self {
        FieldConfig {
            vector_potential: ["-1/2*B*x[2]".into(), "1/2*B*x[1]".into(), "0".into()],
            scalar_potential: "-E1*x[1] - E2*x[2] - E3*x[3]".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NcConfig {
    /// Position scale factor `A` of the Bopp shift (momentum factor is `1/A`).
    pub scale: String,
}

impl Default for NcConfig {
    fn default() -> Self {
        NcConfig { scale: "1".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    /// Packet centre, one entry per represented axis.
    pub x0: Vec<f64>,
    pub p0: Vec<f64>,
    /// Spinor weights as `[re, im]` pairs.
    pub spinor: [[f64; 2]; 4],
    /// Also run at `dt/2` and report the residual ratio.
    pub convergence: bool,
    pub convergence_window: [f64; 2],
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt: 1e-3,
            steps: 2000,
            x0: vec![0.0, 0.0],
            p0: vec![0.0, 0.0],
            spinor: [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            convergence: true,
            convergence_window: [3.6, 4.4],
        }
    }
}

impl EvolutionConfig {
    pub fn spinor(&self) -> [Complex64; 4] {
        self.spinor.map(|[re, im]| Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub identity: f64,
    pub zero_identity: f64,
    pub hermiticity: f64,
    pub ehrenfest: f64,
    pub norm_drift: f64,
    pub energy_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-10,
            zero_identity: 1e-12,
            hermiticity: 1e-12,
            ehrenfest: 1e-5,
            norm_drift: 1e-12,
            energy_drift: 1e-10,
        }
    }
}

/// Complete run configuration. Every key has a default; unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub nc: NcConfig,
    pub convention: String,
    pub field: FieldConfig,
    /// Numerical values. A value of exactly zero also removes the symbol
    /// from symbolic derivations. Listed keys override the default scenario.
    #[serde(deserialize_with = "merge_constants")]
    pub constants: BTreeMap<String, f64>,
    /// Basis for wavepacket evolution and Hermiticity checks.
    pub basis: FockBasisConfig,
    /// Basis for identity checks; three axes so every component is covered.
    pub verify_basis: FockBasisConfig,
    pub evolution: EvolutionConfig,
    pub tolerances: Tolerances,
    pub star_order: usize,
    /// Replacement printed coefficients, keyed `template/term`.
    pub reference_overrides: BTreeMap<String, String>,
    pub output_dir: PathBuf,
}

fn default_constants() -> BTreeMap<String, f64> {
    ConstantValues::default_scenario()
        .iter()
        .map(|(c, v)| (c.name().to_string(), v))
        .collect()
}

fn merge_constants<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<BTreeMap<String, f64>, D::Error> {
    let mut merged = default_constants();
    merged.extend(BTreeMap::<String, f64>::deserialize(de)?);
    Ok(merged)
}

impl Default for RunConfig {
    fn default() -> Self {
        let constants = default_constants();
        RunConfig {
            nc: NcConfig::default(),
            convention: "default".into(),
            field: FieldConfig::default(),
            constants,
            basis: FockBasisConfig::default(),
            verify_basis: FockBasisConfig {
                dim: 3,
                ..FockBasisConfig::default()
            },
            evolution: EvolutionConfig::default(),
            tolerances: Tolerances::default(),
            star_order: 1,
            reference_overrides: BTreeMap::new(),
            output_dir: PathBuf::from("ncdirac-out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(&path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.conventions()?;
        self.values()?;
        self.field_spec()?;
        self.parameters()?;
        self.basis
            .validate()
            .map_err(|e| config_error("basis", e.to_string()))?;
        self.verify_basis
            .validate()
            .map_err(|e| config_error("verify_basis", e.to_string()))?;
        let t = &self.tolerances;
        for (name, v) in [
            ("identity", t.identity),
            ("zero_identity", t.zero_identity),
            ("hermiticity", t.hermiticity),
            ("ehrenfest", t.ehrenfest),
            ("norm_drift", t.norm_drift),
            ("energy_drift", t.energy_drift),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_error(&format!("tolerances.{name}"), "must be positive"));
            }
        }
        let ev = &self.evolution;
        if !(ev.dt.is_finite() && ev.dt > 0.0) {
            return Err(config_error("evolution.dt", "must be positive"));
        }
        if ev.steps < 2 {
            return Err(config_error("evolution.steps", "need at least 2 steps"));
        }
        if ev.x0.len() != self.basis.dim || ev.p0.len() != self.basis.dim {
            return Err(config_error(
                "evolution.x0",
                format!("x0 and p0 need {} components to match basis.dim", self.basis.dim),
            ));
        }
        if ev.convergence_window[0] <= 0.0 || ev.convergence_window[0] > ev.convergence_window[1] {
            return Err(config_error("evolution.convergence_window", "expected [low, high] with 0 < low <= high"));
        }
        if self.star_order == 0 {
            return Err(config_error("star_order", "must be at least 1"));
        }
        if self.basis.dim == 1 {
            let v = self.values()?;
            if v.get(Constant::Theta) != Some(0.0) || v.get(Constant::Eta) != Some(0.0) {
                return Err(config_error("constants", "a one-axis basis requires Theta = eta = 0"));
            }
        }
        Ok(())
    }

    pub fn conventions(&self) -> Result<ConventionConfig> {
        ConventionConfig::by_name(&self.convention).ok_or_else(|| {
            config_error(
                "convention",
                format!("unknown convention '{}', expected one of {:?}", self.convention, ConventionConfig::NAMES),
            )
        })
    }

    pub fn values(&self) -> Result<ConstantValues> {
        let mut v = ConstantValues::empty();
        for (name, &value) in &self.constants {
            let c = Constant::from_name(name)
                .ok_or_else(|| config_error(&format!("constants.{name}"), "unknown constant"))?;
            if !value.is_finite() {
                return Err(config_error(&format!("constants.{name}"), "must be finite"));
            }
            v.set(c, value);
        }
        for c in [Constant::Hbar, Constant::C, Constant::Mass, Constant::Charge] {
            match v.get(c) {
                None => return Err(config_error(&format!("constants.{}", c.name()), "missing")),
                Some(x) if x <= 0.0 => return Err(config_error(&format!("constants.{}", c.name()), "must be positive")),
                _ => {}
            }
        }
        for c in Constant::ALL {
            if v.get(c).is_none() {
                v.set(c, 0.0);
            }
        }
        Ok(v)
    }

    /// Constants bound to exactly zero.
    pub fn zero_constants(&self) -> Result<Vec<Constant>> {
        let v = self.values()?;
        Ok(Constant::ALL.into_iter().filter(|&c| v.get(c) == Some(0.0)).collect())
    }

    pub fn parameters(&self) -> Result<NCParameters> {
        let scale: Rational = self
            .nc
            .scale
            .parse()
            .map_err(|_| config_error("nc.scale", format!("'{}' is not a rational number", self.nc.scale)))?;
        if scale == Rational::from_integer(0) {
            return Err(config_error("nc.scale", "must be nonzero"));
        }
        let zeros = self.zero_constants()?;
        let mut p = NCParameters::symbolic().with_scale(scale);
        if zeros.contains(&Constant::Theta) {
            p = p.with_theta(ScalarCoeff::zero());
        }
        if zeros.contains(&Constant::Eta) {
            p = p.with_eta(ScalarCoeff::zero());
        }
        Ok(p)
    }

    pub fn field_spec(&self) -> Result<FieldSpec> {
        let parse = |path: String, text: &str| -> Result<OperatorExpr> {
            parse_expr(text).map_err(|e| config_error(&path, e.to_string()))
        };
        let f = &self.field;
        let a = [
            parse("field.vector_potential[0]".into(), &f.vector_potential[0])?,
            parse("field.vector_potential[1]".into(), &f.vector_potential[1])?,
            parse("field.vector_potential[2]".into(), &f.vector_potential[2])?,
        ];
        let phi = parse("field.scalar_potential".into(), &f.scalar_potential)?;
        let mut spec = FieldSpec::custom(a, phi).map_err(|e| config_error("field", e.to_string()))?;
        for c in self.zero_constants()? {
            spec = spec.set_to_zero(c);
        }
        Ok(spec)
    }

    pub fn output_dir(&self) -> &Path {
        &self.output_dir
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.field_spec().unwrap(), FieldSpec::symbolic().set_to_zero(Constant::E2).set_to_zero(Constant::E3));
    }

    #[test]
    fn unknown_key_reports_path() {
        let err = RunConfig::from_json(r#"{"evolution": {"dtt": 0.1}}"#).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "evolution.dtt");
                assert!(message.contains("unknown field"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn bad_expression_reports_path() {
        let err = RunConfig::from_json(r#"{"field": {"vector_potential": ["x[1]*", "0", "0"], "scalar_potential": "0"}}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "field.vector_potential[0]"), "{err}");
    }

    #[test]
    fn zero_values_remove_symbols() {
        let cfg = RunConfig::from_json(r#"{"constants": {"Theta":0,"eta":0,"E1":0}}"#).unwrap();
        assert!(cfg.parameters().unwrap().is_commutative());
        assert!(cfg.field_spec().unwrap().scalar_potential().is_zero());
    }

    #[test]
    fn partial_constants_keep_defaults() {
        let cfg = RunConfig::from_json(r#"{"constants": {"B": 2.5}}"#).unwrap();
        let v = cfg.values().unwrap();
        assert_eq!(v.get(Constant::B), Some(2.5));
        assert_eq!(v.get(Constant::Theta), Some(0.01));
        assert_eq!(v.get(Constant::Hbar), Some(1.0));
    }

    #[test]
    fn rejects_nonpositive_tolerance_and_bad_convention() {
        assert!(RunConfig::from_json(r#"{"tolerances": {"identity": 0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"convention": "weird"}"#).is_err());
    }
}
