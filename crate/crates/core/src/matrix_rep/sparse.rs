use ndarray::Array2;
use num_complex::Complex64;

/// Compressed sparse row matrix over complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_triplets(d.len(), d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Duplicates are summed; exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut per_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            per_row[r].push((c, v));
        }
        let mut m = CsrMatrix::zeros(rows, cols);
        for (r, mut entries) in per_row.into_iter().enumerate() {
            entries.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in entries {
                if last == Some(c) {
                    *m.data.last_mut().expect("entry pushed") += v;
                } else {
                    m.indices.push(c);
                    m.data.push(v);
                    last = Some(c);
                }
            }
            m.indptr[r + 1] = m.indices.len();
        }
        m.prune()
    }

    fn prune(self) -> Self {
        let rows = self.rows;
        let mut m = CsrMatrix::zeros(rows, self.cols);
        for r in 0..rows {
            for (c, v) in self.row(r) {
                if v != Complex64::new(0.0, 0.0) {
                    m.indices.push(c);
                    m.data.push(v);
                }
            }
            m.indptr[r + 1] = m.indices.len();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.data[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r).find(|e| e.0 == c).map_or(Complex64::new(0.0, 0.0), |e| e.1)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        if s == Complex64::new(0.0, 0.0) {
            return CsrMatrix::zeros(self.rows, self.cols);
        }
        m
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: Complex64, other: &CsrMatrix, b: Complex64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sum");
        let mut m = CsrMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let mut x = self.row(r).peekable();
            let mut y = other.row(r).peekable();
            loop {
                let (c, v) = match (x.peek(), y.peek()) {
                    (None, None) => break,
                    (Some(&(cx, vx)), Some(&(cy, _))) if cx < cy => {
                        x.next();
                        (cx, a * vx)
                    }
                    (Some(&(cx, _)), Some(&(cy, vy))) if cy < cx => {
                        y.next();
                        (cy, b * vy)
                    }
                    (Some(&(cx, vx)), Some(&(_, vy))) => {
                        x.next();
                        y.next();
                        (cx, a * vx + b * vy)
                    }
                    (Some(&(cx, vx)), None) => {
                        x.next();
                        (cx, a * vx)
                    }
                    (None, Some(&(cy, vy))) => {
                        y.next();
                        (cy, b * vy)
                    }
                };
                if v != Complex64::new(0.0, 0.0) {
                    m.indices.push(c);
                    m.data.push(v);
                }
            }
            m.indptr[r + 1] = m.indices.len();
        }
        m
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        let one = Complex64::new(1.0, 0.0);
        self.axpby(one, other, one)
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        let one = Complex64::new(1.0, 0.0);
        self.axpby(one, other, -one)
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = vec![zero; other.cols];
        let mut touched = vec![false; other.cols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut m = CsrMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                if acc[c] != zero {
                    m.indices.push(c);
                    m.data.push(acc[c]);
                }
                acc[c] = zero;
                touched[c] = false;
            }
            pattern.clear();
            m.indptr[r + 1] = m.indices.len();
        }
        m
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &CsrMatrix) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn kron(&self, other: &CsrMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = CsrMatrix::zeros(rows, cols);
        for ra in 0..self.rows {
            for rb in 0..other.rows {
                for (ca, va) in self.row(ra) {
                    for (cb, vb) in other.row(rb) {
                        m.indices.push(ca * other.cols + cb);
                        m.data.push(va * vb);
                    }
                }
                m.indptr[ra * other.rows + rb + 1] = m.indices.len();
            }
        }
        m
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| self.row(r).map(|(c, a)| a * v[c]).sum())
            .collect()
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        (0..self.rows)
            .map(|r| v[r].conj() * self.row(r).map(|(c, a)| a * v[c]).sum::<Complex64>())
            .sum()
    }

    /// Keeps entries whose row and column both satisfy `keep`.
    pub fn restrict(&self, keep: &[bool]) -> Self {
        let mut m = CsrMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            if keep[r] {
                for (c, v) in self.row(r) {
                    if keep[c] {
                        m.indices.push(c);
                        m.data.push(v);
                    }
                }
            }
            m.indptr[r + 1] = m.indices.len();
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc + v.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Power-iteration estimate of the largest singular value. Always a
    /// lower bound on the spectral norm.
    pub fn spectral_norm_estimate(&self, iterations: usize) -> f64 {
        if self.nnz() == 0 {
            return 0.0;
        }
        let adj = self.adjoint();
        // deterministic start with every component nonzero
        let mut v: Vec<Complex64> = (0..self.cols)
            .map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 5) as f64 * 0.05))
            .collect();
        let mut sigma = 0.0;
        for _ in 0..iterations {
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return sigma;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            let av = self.matvec(&v);
            sigma = av.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            v = adj.matvec(&av);
        }
        sigma
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut a = Array2::zeros((self.rows, self.cols));
        for (r, c, v) in self.triplets() {
            a[[r, c]] = v;
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_matches_dense() {
        let a = CsrMatrix::from_triplets(2, 3, [(0, 0, c(1.0, 0.0)), (0, 2, c(0.0, 2.0)), (1, 1, c(3.0, 0.0))]);
        let b = CsrMatrix::from_triplets(3, 2, [(0, 1, c(1.0, 1.0)), (2, 0, c(2.0, 0.0)), (1, 0, c(-1.0, 0.0))]);
        assert_eq!(a.matmul(&b).to_dense(), a.to_dense().dot(&b.to_dense()));
    }

    #[test]
    fn kron_and_adjoint() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))]);
        let i = CsrMatrix::identity(3);
        let k = a.kron(&i);
        assert_eq!(k.get(1, 4), c(0.0, 1.0));
        assert_eq!(k.get(5, 2), c(0.0, -1.0));
        assert_eq!(k.adjoint(), k);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = CsrMatrix::diagonal(&[c(1.0, 0.0), c(-3.0, 0.0), c(2.0, 0.0)]);
        assert!((d.spectral_norm_estimate(200) - 3.0).abs() < 1e-8);
    }

    #[test]
    fn sum_cancels_exactly() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 1, c(1.5, 0.0))]);
        assert_eq!(a.sub(&a).nnz(), 0);
    }
}
