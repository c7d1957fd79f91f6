use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::TheoryError;
use crate::manifold::{direction_pairs, Direction, GeometrySpec, Kind};
use crate::numkern::{eigvals_hermitian, HermitianMatrix, Matrix};

/// Eigenvalues of the radial curvature operator `u ↦ R(u, s)s` on the
/// orthogonal complement of `s`, ascending.
///
/// On both families `R(u, s)s = −¼[s, [s, u]]`. The operator is assembled
/// on an orthonormal basis of the tangent space and diagonalized, so the
/// result does not presuppose the `∓κᵢⱼ²` spectrum. Quaternion matrices use
/// that spectrum directly: `−κᵢⱼ²` four times per pair plus `N − 1` zeros.
pub fn curvature_spectrum(geom: &GeometrySpec, dir: &Direction) -> Result<Vec<f64>, TheoryError> {
    let n = geom.rank();
    if let Kind::Spd { beta, .. } = geom.kind() {
        if beta.as_int() == 4 {
            let mut v = vec![0.0; n - 1];
            for k in direction_pairs(dir.sigma()) {
                v.extend([-k * k; 4]);
            }
            v.sort_by(f64::total_cmp);
            return Ok(v);
        }
    }
    let basis = tangent_basis(geom);
    let s = dir.s();
    let images: Vec<Matrix> = basis
        .iter()
        .map(|e| {
            let c = &(s * e) - &(e * s);
            (&(s * &c) - &(&c * s)).scale(-0.25)
        })
        .collect();
    let dim = basis.len();
    let op = Matrix::from_fn(dim, |a, b| Complex64::new(real_inner(&basis[a], &images[b]), 0.0));
    let mut values = eigvals_hermitian(&HermitianMatrix::hermitian_part(&op))?;
    // Drop the eigenvalue belonging to s itself (one of the zeros).
    let zero = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    values.remove(zero);
    Ok(values)
}

/// `Re tr(a† b)`.
fn real_inner(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Orthonormal basis of the tangent space at the identity under `Re tr(u† v)`.
fn tangent_basis(geom: &GeometrySpec) -> Vec<Matrix> {
    let n = geom.rank();
    let complex = geom.beta() == 2;
    let mut basis = Vec::with_capacity(geom.dim());
    let unit = |i: usize, j: usize, v: Complex64| {
        let mut m = Matrix::zeros(n);
        m[(i, j)] = v;
        m
    };
    for i in 0..n {
        basis.push(unit(i, i, Complex64::new(1.0, 0.0)));
        for j in i + 1..n {
            let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
            basis.push(&unit(i, j, c) + &unit(j, i, c));
            if complex {
                let c = Complex64::new(0.0, FRAC_1_SQRT_2);
                basis.push(&unit(i, j, c) - &unit(j, i, c));
            }
        }
    }
    if !geom.is_spd() {
        let i = Complex64::new(0.0, 1.0);
        basis = basis.into_iter().map(|m| m.scale_complex(i)).collect();
    }
    basis
}

/// `a(r)` for `a″ = −λa`, `a(0) = 0`, `a′(0) = 1`, by classical RK4.
pub fn rk4_jacobi(lambda: f64, r: f64, steps: usize) -> f64 {
    let h = r / steps as f64;
    let (mut a, mut v) = (0.0f64, 1.0f64);
    for _ in 0..steps {
        let k1 = (v, -lambda * a);
        let k2 = (v + 0.5 * h * k1.1, -lambda * (a + 0.5 * h * k1.0));
        let k3 = (v + 0.5 * h * k2.1, -lambda * (a + 0.5 * h * k2.0));
        let k4 = (v + h * k3.1, -lambda * (a + h * k3.0));
        a += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    a
}

/// `ln|det A(r, s)|` from the Jacobi equation `A″ + R A = 0`, `A(0) = 0`,
/// `A′(0) = I`, integrated with `steps` RK4 steps in the eigenbasis of the
/// constant operator `R`.
pub fn jacobi_ode_det(
    geom: &GeometrySpec,
    r: f64,
    dir: &Direction,
    steps: usize,
) -> Result<f64, TheoryError> {
    if !(r > 0.0) {
        return Err(TheoryError::Domain(format!("r must be positive, got {r}")));
    }
    if steps == 0 {
        return Err(TheoryError::Domain("need at least one step".into()));
    }
    let spectrum = curvature_spectrum(geom, dir)?;
    Ok(spectrum.iter().map(|&l| rk4_jacobi(l, r, steps).abs().ln()).sum())
}
