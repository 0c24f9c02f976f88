use std::fmt::Write as _;
use std::os::raw::{c_char, c_int};

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator_ir::Constant;

use super::realize::{hermiticity_residual, Realizer};
use super::sparse::CsrMatrix;

const HERMITIAN_TOL: f64 = 1e-12;

/// Eigen-decomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: Array2<Complex64>,
}

impl SpectralDecomposition {
    pub fn new(h: &CsrMatrix) -> Result<Self> {
        let residual = hermiticity_residual(h);
        if residual > HERMITIAN_TOL {
            return Err(Error::NonHermitian { residual });
        }
        let n = h.rows();
        // column-major copy of the upper triangle is all LAPACK reads
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for (r, c, v) in h.triplets() {
            a[c * n + r] = v;
        }
        let mut w = vec![0.0; n];
        let (jobz, uplo) = (b'V' as c_char, b'U' as c_char);
        let nn = n as c_int;
        let mut info: c_int = 0;
        let mut work_q = [Complex64::new(0.0, 0.0)];
        let mut rwork_q = [0.0f64];
        let mut iwork_q: [c_int; 1] = [0];
        let query: c_int = -1;
        // SAFETY: buffers match the sizes LAPACK is told about; the first
        // call only queries workspace sizes.
        unsafe {
            lapack_sys::zheevd_(
                &jobz,
                &uplo,
                &nn,
                a.as_mut_ptr().cast(),
                &nn,
                w.as_mut_ptr(),
                work_q.as_mut_ptr().cast(),
                &query,
                rwork_q.as_mut_ptr(),
                &query,
                iwork_q.as_mut_ptr(),
                &query,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        let lwork = work_q[0].re as c_int;
        let lrwork = rwork_q[0] as c_int;
        let liwork = iwork_q[0];
        let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
        let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
        let mut iwork: Vec<c_int> = vec![0; liwork.max(1) as usize];
        // SAFETY: as above, with workspaces of the queried sizes.
        unsafe {
            lapack_sys::zheevd_(
                &jobz,
                &uplo,
                &nn,
                a.as_mut_ptr().cast(),
                &nn,
                w.as_mut_ptr(),
                work.as_mut_ptr().cast(),
                &lwork,
                rwork.as_mut_ptr(),
                &lrwork,
                iwork.as_mut_ptr(),
                &liwork,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        let vectors = Array2::from_shape_fn((n, n), |(r, c)| a[c * n + r]);
        Ok(SpectralDecomposition { eigenvalues: w, vectors })
    }
}

/// A normalized state in the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub Vec<Complex64>);

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.0.iter_mut().for_each(|c| *c /= n);
        self
    }

    pub fn expectation(&self, op: &CsrMatrix) -> Complex64 {
        op.expectation(&self.0)
    }
}

/// Probability of Fock level `≥ limit` in a coherent state with `|α|² = mean`.
fn coherent_tail(mean: f64, limit: usize) -> f64 {
    // Poisson terms from `limit` upward, evaluated in log space
    let mut log_fact = 0.0;
    for k in 1..=limit {
        log_fact += (k as f64).ln();
    }
    let mut total = 0.0;
    let mut n = limit;
    loop {
        let term = if mean == 0.0 {
            if n == 0 { 1.0 } else { 0.0 }
        } else {
            (-mean + n as f64 * mean.ln() - log_fact).exp()
        };
        total += term;
        n += 1;
        log_fact += (n as f64).ln();
        if term < 1e-300 || n > limit + 2000 {
            break;
        }
    }
    total
}

/// Coherent state of the scaffold oscillator on each axis, times a spinor.
///
/// `x0` and `p0` hold one entry per represented axis.
pub fn gaussian_packet(realizer: &Realizer, x0: &[f64], p0: &[f64], spinor: [Complex64; 4]) -> Result<StateVector> {
    let basis = realizer.basis();
    if x0.len() != basis.dim || p0.len() != basis.dim {
        return Err(Error::InvalidBasis(format!(
            "packet centre has {} / {} components for a {}-axis basis",
            x0.len(),
            p0.len(),
            basis.dim
        )));
    }
    let hbar = realizer.values().require(Constant::Hbar)?;
    let mass = realizer.values().require(Constant::Mass)?;
    let sx = (hbar / (2.0 * mass * basis.omega)).sqrt();
    let sp = (mass * hbar * basis.omega / 2.0).sqrt();
    let n = basis.levels;
    let mut axes = Vec::new();
    let mut kept = 1.0;
    for k in 0..basis.dim {
        let alpha = Complex64::new(x0[k] / (2.0 * sx), p0[k] / (2.0 * sp));
        kept *= 1.0 - coherent_tail(alpha.norm_sqr(), n - basis.guard);
        let mut amp = Vec::with_capacity(n);
        let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for level in 0..n {
            if level > 0 {
                c *= alpha / (level as f64).sqrt();
            }
            amp.push(c);
        }
        axes.push(amp);
    }
    let spill = 1.0 - kept;
    if spill > 1e-12 {
        return Err(Error::OccupancySpill { probability: spill });
    }
    let spatial = basis.spatial_dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); basis.total_dim()];
    for (s, w) in spinor.iter().enumerate() {
        for idx in 0..spatial {
            let occ = basis.occupation(idx);
            let amp: Complex64 = occ.iter().enumerate().map(|(k, &l)| axes[k][l]).product();
            psi[s * spatial + idx] = w * amp;
        }
    }
    let state = StateVector(psi);
    if state.norm() == 0.0 {
        return Err(Error::InvalidBasis("spinor weights are all zero".into()));
    }
    Ok(state.normalized())
}

/// Expectation values on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub names: Vec<String>,
    /// One column per observable, aligned with `times`.
    pub columns: Vec<Vec<f64>>,
    pub dt: f64,
}

impl Trajectory {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::MissingColumn(name.into()))
    }

    /// `t,norm,<observables...>` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,norm");
        for n in &self.names {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let _ = write!(s, "{t:.16e},{:.16e}", self.norms[k]);
            for c in &self.columns {
                let _ = write!(s, ",{:.16e}", c[k]);
            }
            s.push('\n');
        }
        s
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max_t |f(t) − f(0)|` for one column.
    pub fn max_drift(&self, name: &str) -> Result<f64> {
        let c = self.column(name)?;
        Ok(c.iter().map(|v| (v - c[0]).abs()).fold(0.0, f64::max))
    }
}

/// `ψ(t_k) = V e^{−iΛ t_k/ħ} V† ψ₀`, evaluated directly at every step so
/// that phase errors do not accumulate.
pub fn evolve(
    spectrum: &SpectralDecomposition,
    psi0: &StateVector,
    hbar: f64,
    dt: f64,
    steps: usize,
    observables: &[(String, CsrMatrix)],
) -> Trajectory {
    let v = &spectrum.vectors;
    let n = v.nrows();
    let c0: Array1<Complex64> = v.t().mapv(|z| z.conj()).dot(&Array1::from(psi0.0.clone()));
    let total = steps + 1;
    let mut times = Vec::with_capacity(total);
    let mut norms = Vec::with_capacity(total);
    let mut columns = vec![Vec::with_capacity(total); observables.len()];
    const CHUNK: usize = 128;
    let mut start = 0;
    while start < total {
        let len = CHUNK.min(total - start);
        let mut coeffs = Array2::<Complex64>::zeros((n, len));
        for j in 0..len {
            let t = (start + j) as f64 * dt;
            for (i, (&lam, &c)) in spectrum.eigenvalues.iter().zip(c0.iter()).enumerate() {
                coeffs[[i, j]] = c * Complex64::from_polar(1.0, -lam * t / hbar);
            }
        }
        let block = v.dot(&coeffs);
        for j in 0..len {
            let psi: Vec<Complex64> = block.slice(s![.., j]).to_vec();
            times.push((start + j) as f64 * dt);
            norms.push(psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
            for (col, (_, op)) in columns.iter_mut().zip(observables) {
                col.push(op.expectation(&psi).re);
            }
        }
        start += len;
    }
    Trajectory {
        times,
        norms,
        names: observables.iter().map(|(n, _)| n.clone()).collect(),
        columns,
        dt,
    }
}

/// `|central-difference d⟨F⟩/dt − ⟨RHS⟩|` at interior grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EhrenfestSeries {
    pub base: String,
    pub rhs: String,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max: f64,
}

pub fn ehrenfest_residual(traj: &Trajectory, base: &str, rhs: &str) -> Result<EhrenfestSeries> {
    let f = traj.column(base)?;
    let g = traj.column(rhs)?;
    let mut times = Vec::new();
    let mut residuals = Vec::new();
    for k in 1..f.len().saturating_sub(1) {
        let d = (f[k + 1] - f[k - 1]) / (2.0 * traj.dt);
        times.push(traj.times[k]);
        residuals.push((d - g[k]).abs());
    }
    let max = residuals.iter().copied().fold(0.0, f64::max);
    Ok(EhrenfestSeries {
        base: base.into(),
        rhs: rhs.into(),
        times,
        residuals,
        max,
    })
}

/// Ratio of maximal residuals between a step `dt` and a step `dt/2` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceCheck {
    pub identity: String,
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
    pub window: [f64; 2],
    pub pass: bool,
}

pub fn convergence(identity: &str, coarse: &EhrenfestSeries, fine: &EhrenfestSeries, window: [f64; 2]) -> ConvergenceCheck {
    let ratio = coarse.max / fine.max;
    ConvergenceCheck {
        identity: identity.into(),
        coarse: coarse.max,
        fine: fine.max,
        ratio,
        window,
        pass: ratio >= window[0] && ratio <= window[1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac_model::FieldSpec;
    use crate::matrix_rep::{ConstantValues, FockBasisConfig};
    use crate::operator_ir::parse_expr;

    fn realizer(levels: usize) -> Realizer {
        Realizer::new(
            FockBasisConfig::new(1, levels, 1.0, 3).unwrap(),
            ConstantValues::default_scenario(),
            FieldSpec::free(),
        )
        .unwrap()
    }

    fn up() -> [Complex64; 4] {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
    }

    #[test]
    fn coherent_state_centre() {
        let r = realizer(24);
        let psi = gaussian_packet(&r, &[0.5], &[-0.3], up()).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let x = r.realize(&parse_expr("x[1]").unwrap()).unwrap();
        let p = r.realize(&parse_expr("p[1]").unwrap()).unwrap();
        assert!((psi.expectation(&x).re - 0.5).abs() < 1e-10);
        assert!((psi.expectation(&p).re + 0.3).abs() < 1e-10);
    }

    #[test]
    fn spill_is_reported() {
        let r = realizer(8);
        assert!(matches!(
            gaussian_packet(&r, &[3.0], &[0.0], up()),
            Err(Error::OccupancySpill { .. })
        ));
    }

    #[test]
    fn eigen_decomposition_reconstructs() {
        let r = realizer(8);
        let h = r.realize(&parse_expr("alpha[1]*p[1] + beta + x[1]*x[1]").unwrap()).unwrap();
        let sd = SpectralDecomposition::new(&h).unwrap();
        let v = &sd.vectors;
        let d = Array2::from_diag(&Array1::from(sd.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)).collect::<Vec<_>>()));
        let back = v.dot(&d).dot(&v.t().mapv(|z| z.conj()));
        let dense = h.to_dense();
        let err = (&back - &dense).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let r = realizer(8);
        let h = r.realize(&parse_expr("x[1]*p[1]").unwrap()).unwrap();
        assert!(matches!(SpectralDecomposition::new(&h), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn constant_observable_has_zero_residual() {
        let r = realizer(10);
        let h = r.realize(&parse_expr("alpha[1]*p[1] + beta").unwrap()).unwrap();
        let sd = SpectralDecomposition::new(&h).unwrap();
        let psi = gaussian_packet(&r, &[0.2], &[0.0], up()).unwrap();
        let obs = vec![("one".to_string(), r.identity()), ("zero".to_string(), CsrMatrix::zeros(r.dimension(), r.dimension()))];
        let traj = evolve(&sd, &psi, 1.0, 1e-3, 50, &obs);
        assert!(ehrenfest_residual(&traj, "one", "zero").unwrap().max <= 1e-12);
        assert!(traj.max_norm_drift() < 1e-12);
        assert!(matches!(ehrenfest_residual(&traj, "x", "zero"), Err(Error::MissingColumn(_))));
        let csv = traj.to_csv();
        assert!(csv.starts_with("t,norm,one,zero\n"));
        assert_eq!(csv.lines().count(), 52);
    }
}
