//! Cyclic Jacobi eigensolver for Hermitian matrices and the matrix functions
//! built on it.

use num_complex::Complex64;

use super::matrix::{HermitianMatrix, Matrix};
use super::NumError;

/// Sweep budget for the Jacobi iteration. Matrices here are at most a few
/// dozen rows, where convergence takes well under 15 sweeps.
const MAX_SWEEPS: usize = 60;

/// Off-diagonal max-norm must fall below this multiple of the matrix norm.
const OFFDIAG_TOL: f64 = 1e-13;

/// Eigenvalues at or below this are treated as non-positive.
pub const PD_TOL: f64 = 1e-12;

/// Eigen-pairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: Matrix,
}

impl Eigen {
    /// `V · diag(f(λ)) · V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let d: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        HermitianMatrix::hermitian_part(&Matrix::conjugate_diag(&self.vectors, &d))
    }

    pub fn reconstruct(&self) -> Matrix {
        Matrix::conjugate_diag(&self.vectors, &self.values)
    }
}

/// Full eigendecomposition `m = V diag(λ) V†`, λ ascending.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<Eigen, NumError> {
    let a = m.matrix();
    let n = a.n();
    if a.is_real() {
        let mut w: Vec<f64> = a.as_slice().iter().map(|z| z.re).collect();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        jacobi_real(&mut w, n, Some(&mut v))?;
        let values: Vec<f64> = (0..n).map(|i| w[i * n + i]).collect();
        let order = ascending_order(&values);
        let vectors = Matrix::from_fn(n, |i, j| Complex64::new(v[i * n + order[j]], 0.0));
        Ok(Eigen {
            values: order.iter().map(|&k| values[k]).collect(),
            vectors,
        })
    } else {
        let mut w = a.clone();
        let mut v = Matrix::identity(n);
        jacobi_complex(&mut w, Some(&mut v))?;
        let values: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
        let order = ascending_order(&values);
        let vectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
        Ok(Eigen {
            values: order.iter().map(|&k| values[k]).collect(),
            vectors,
        })
    }
}

/// Eigenvalues only, ascending. Skips eigenvector accumulation.
pub fn eigvals_hermitian(m: &HermitianMatrix) -> Result<Vec<f64>, NumError> {
    let a = m.matrix();
    let n = a.n();
    let mut values: Vec<f64> = if a.is_real() {
        let mut w: Vec<f64> = a.as_slice().iter().map(|z| z.re).collect();
        jacobi_real(&mut w, n, None)?;
        (0..n).map(|i| w[i * n + i]).collect()
    } else {
        let mut w = a.clone();
        jacobi_complex(&mut w, None)?;
        (0..n).map(|i| w[(i, i)].re).collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Jacobi rotation parameters `(t, c, s)` annihilating the real 2×2 block
/// `[[app, apq], [apq, aqq]]`.
#[inline]
fn rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (t, c, t * c)
}

fn jacobi_real(a: &mut [f64], n: usize, mut v: Option<&mut [f64]>) -> Result<(), NumError> {
    let norm = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if norm == 0.0 || n < 2 {
        return Ok(());
    }
    let tol = OFFDIAG_TOL * norm;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off < tol {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (t, c, s) = rotation(a[p * n + p], a[q * n + q], apq);
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Err(NumError::ConvergenceFailure(MAX_SWEEPS))
}

fn jacobi_complex(a: &mut Matrix, mut v: Option<&mut Matrix>) -> Result<(), NumError> {
    let n = a.n();
    let norm = a.max_abs();
    if norm == 0.0 || n < 2 {
        return Ok(());
    }
    let tol = OFFDIAG_TOL * norm;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off < tol {
            for i in 0..n {
                a[(i, i)].im = 0.0;
            }
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Rotate the phase of index q so that a[p][q] becomes real.
                let phase = apq / r;
                let phase_conj = phase.conj();
                for k in 0..n {
                    a[(k, q)] *= phase_conj;
                }
                for k in 0..n {
                    a[(q, k)] *= phase;
                }
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        v[(k, q)] *= phase_conj;
                    }
                }
                let (t, c, s) = rotation(a[(p, p)].re, a[(q, q)].re, r);
                a[(p, p)] = Complex64::new(a[(p, p)].re - t * r, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re + t * r, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let new_kp = akp * c - akq * s;
                    let new_kq = akp * s + akq * c;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp.conj();
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq.conj();
                }
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * s;
                        v[(k, q)] = vkp * s + vkq * c;
                    }
                }
            }
        }
    }
    Err(NumError::ConvergenceFailure(MAX_SWEEPS))
}

/// Matrix exponential of a Hermitian matrix.
pub fn expm_hermitian(m: &HermitianMatrix) -> Result<HermitianMatrix, NumError> {
    Ok(eig_hermitian(m)?.map(f64::exp))
}

/// `exp(i·t·h)` for Hermitian `h`; the result is unitary.
pub fn expm_i_hermitian(h: &HermitianMatrix, t: f64) -> Result<Matrix, NumError> {
    let eig = eig_hermitian(h)?;
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, t * l))
        .collect();
    Ok(Matrix::conjugate_complex_diag(&eig.vectors, &phases))
}

fn positive_eigen(x: &HermitianMatrix) -> Result<Eigen, NumError> {
    let eig = eig_hermitian(x)?;
    match eig.values.first() {
        Some(&min) if min <= PD_TOL => Err(NumError::NotPositiveDefinite(min)),
        _ => Ok(eig),
    }
}

/// Principal logarithm of a positive-definite matrix.
pub fn logm_spd(x: &HermitianMatrix) -> Result<HermitianMatrix, NumError> {
    Ok(positive_eigen(x)?.map(f64::ln))
}

/// Positive-definite square root.
pub fn sqrtm_spd(x: &HermitianMatrix) -> Result<HermitianMatrix, NumError> {
    Ok(positive_eigen(x)?.map(f64::sqrt))
}

/// Inverse of the positive-definite square root.
pub fn inv_sqrtm_spd(x: &HermitianMatrix) -> Result<HermitianMatrix, NumError> {
    Ok(positive_eigen(x)?.map(|l| 1.0 / l.sqrt()))
}

/// Eigenvalues of a positive-definite matrix, with the positivity check.
pub fn eigvals_spd(x: &HermitianMatrix) -> Result<Vec<f64>, NumError> {
    let values = eigvals_hermitian(x)?;
    match values.first() {
        Some(&min) if min <= PD_TOL => Err(NumError::NotPositiveDefinite(min)),
        _ => Ok(values),
    }
}

/// Eigen-angles `θ ∈ (−π, π]` of a unitary matrix, ascending.
///
/// Diagonalizes the commuting Hermitian parts `(w + w†)/2` and
/// `(w − w†)/2i` jointly: the first fixes `cos θ`, and inside each of its
/// degenerate clusters the second resolves the sign of `sin θ`.
pub fn unitary_eigen_angles(w: &Matrix) -> Result<Vec<f64>, NumError> {
    const CLUSTER_TOL: f64 = 1e-7;
    let n = w.n();
    let wa = w.adjoint();
    let cos_part = HermitianMatrix::hermitian_part(&(w + &wa).scale(0.5));
    let sin_part = HermitianMatrix::hermitian_part(
        &(w - &wa).scale_complex(Complex64::new(0.0, -0.5)),
    );
    let eig = eig_hermitian(&cos_part)?;
    let mut basis = eig.vectors;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] < CLUSTER_TOL {
            end += 1;
        }
        let k = end - start;
        if k > 1 {
            // Restrict the sine part to the cluster subspace and rotate within it.
            let restricted = Matrix::from_fn(k, |a, b| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += basis[(i, start + a)].conj()
                            * sin_part.matrix()[(i, j)]
                            * basis[(j, start + b)];
                    }
                }
                acc
            });
            let inner = eig_hermitian(&HermitianMatrix::hermitian_part(&restricted))?;
            let old: Vec<Vec<Complex64>> = (0..n)
                .map(|i| (0..k).map(|a| basis[(i, start + a)]).collect())
                .collect();
            for i in 0..n {
                for b in 0..k {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..k {
                        acc += old[i][a] * inner.vectors[(a, b)];
                    }
                    basis[(i, start + b)] = acc;
                }
            }
        }
        start = end;
    }
    let mut angles: Vec<f64> = (0..n)
        .map(|col| {
            let mut z = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    z += basis[(i, col)].conj() * w[(i, j)] * basis[(j, col)];
                }
            }
            let theta = z.arg();
            if theta <= -std::f64::consts::PI {
                std::f64::consts::PI
            } else {
                theta
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}
