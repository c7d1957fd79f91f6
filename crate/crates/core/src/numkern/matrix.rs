//! Dense square matrices over the complex numbers.
//!
//! Real matrices (β = 1) are stored with a zero imaginary part; the eigensolver
//! detects this and takes a real fast path.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use super::NumError;

/// Absolute per-entry tolerance for the Hermitian invariant.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense `n × n` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_complex_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major real and (optional) imaginary rows.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self, NumError> {
        let n = re.len();
        if re.iter().any(|row| row.len() != n) {
            return Err(NumError::Shape(format!("real part is not {n}×{n}")));
        }
        if let Some(im) = im {
            if im.len() != n || im.iter().any(|row| row.len() != n) {
                return Err(NumError::Shape(format!("imaginary part is not {n}×{n}")));
            }
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let b = im.map_or(0.0, |im| im[i][j]);
                m[(i, j)] = Complex64::new(re[i][j], b);
            }
        }
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, NumError> {
        Self::from_parts(rows, None)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].re).collect())
            .collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].im).collect())
            .collect()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * a).collect(),
        }
    }

    pub fn scale_complex(&self, a: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * a).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm, `sqrt(tr(m m†))`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest per-entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `m − m†` from zero.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest deviation of `m + m†` from zero.
    pub fn skew_hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] + self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest deviation of `m m†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self * &self.adjoint()).max_abs_diff(&Self::identity(self.n))
    }

    /// `V · diag(d) · V†` for a real diagonal.
    pub fn conjugate_diag(v: &Matrix, diag: &[f64]) -> Self {
        let n = v.n;
        assert_eq!(diag.len(), n);
        Self::from_fn(n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &d) in diag.iter().enumerate() {
                acc += v[(i, k)] * v[(j, k)].conj() * d;
            }
            acc
        })
    }

    /// `V · diag(d) · V†` for a complex diagonal.
    pub fn conjugate_complex_diag(v: &Matrix, diag: &[Complex64]) -> Self {
        let n = v.n;
        assert_eq!(diag.len(), n);
        Self::from_fn(n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &d) in diag.iter().enumerate() {
                acc += v[(i, k)] * d * v[(j, k)].conj();
            }
            acc
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A matrix known to equal its conjugate transpose.
///
/// Construction checks the invariant to [`HERMITIAN_TOL`] and then replaces the
/// matrix by its exact Hermitian part, so downstream kernels see exact symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    pub fn new(m: Matrix) -> Result<Self, NumError> {
        let defect = m.hermitian_defect();
        if !(defect <= HERMITIAN_TOL * (1.0 + m.max_abs())) {
            return Err(NumError::NotHermitian(defect));
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(m + m†) / 2`, with no tolerance check.
    pub fn hermitian_part(m: &Matrix) -> Self {
        let n = m.n();
        let mut h = Matrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        for i in 0..n {
            h[(i, i)].im = 0.0;
        }
        Self(h)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self(Matrix::from_diag(diag))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, a: f64) -> Self {
        Self(self.0.scale(a))
    }

    /// `tr(m²)`, the squared norm under the trace metric.
    pub fn trace_norm_sqr(&self) -> f64 {
        self.0.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }
}

/// A real skew-symmetric matrix of even side length.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewSymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SkewSymmetricMatrix {
    /// Antisymmetrizes `rows` as `(a − aᵀ)/2`, so the invariant holds exactly.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumError> {
        let n = rows.len();
        if rows.iter().any(|row| row.len() != n) {
            return Err(NumError::Shape(format!("skew matrix is not {n}×{n}")));
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (rows[i][j] - rows[j][i])))
    }

    /// Builds from the upper triangle `f(i, j)` for `i < j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = -v;
            }
        }
        Self { n, data }
    }

    fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_upper(n, |i, j| f(i, j))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }
}
