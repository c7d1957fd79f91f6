use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{GeometryError, GeometrySpec, Kind};
use crate::numkern::{
    eigvals_hermitian, log_abs_sin_ratio, log_sinh_ratio, HermitianMatrix, Matrix, HERMITIAN_TOL,
};

const UNIT_TOL: f64 = 1e-10;

/// Unit tangent vector at the base point, with its defining eigenvalues.
///
/// SPD: `s` is Hermitian with eigenvalues `ς`. `U(N)`: `s` is
/// skew-Hermitian with eigenvalues `i·ς`. Either way `Σ ςᵢ² = 1` and `ς` is
/// sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    s: Matrix,
    sigma: Vec<f64>,
}

impl Direction {
    /// The diagonal direction with eigenvalues `sigma` (any order).
    pub fn from_eigenvalues(geom: &GeometrySpec, sigma: &[f64]) -> Result<Self, GeometryError> {
        if sigma.len() != geom.rank() {
            return Err(GeometryError::Invalid(format!(
                "expected {} eigenvalues, got {}",
                geom.rank(),
                sigma.len()
            )));
        }
        let norm2: f64 = sigma.iter().map(|v| v * v).sum();
        if (norm2 - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::Invalid(format!(
                "eigenvalues must have unit norm, got Σς² = {norm2}"
            )));
        }
        let s = match geom.kind() {
            Kind::Spd { .. } => Matrix::from_diag(sigma),
            Kind::Unitary { .. } => Matrix::from_complex_diag(
                &sigma.iter().map(|&v| Complex64::new(0.0, v)).collect::<Vec<_>>(),
            ),
        };
        let mut sigma = sigma.to_vec();
        sort_descending(&mut sigma);
        Ok(Self { s, sigma })
    }

    /// Wraps a tangent matrix: Hermitian for SPD (real for β = 1),
    /// skew-Hermitian for `U(N)`, unit norm either way.
    pub fn from_matrix(geom: &GeometrySpec, s: Matrix) -> Result<Self, GeometryError> {
        if s.n() != geom.rank() {
            return Err(GeometryError::Invalid(format!(
                "expected a {0}×{0} matrix, got {1}×{1}",
                geom.rank(),
                s.n()
            )));
        }
        let h = match geom.kind() {
            Kind::Spd { beta, .. } => {
                if beta.as_int() == 1 && !s.is_real() {
                    return Err(GeometryError::Invalid("real SPD directions must be real".into()));
                }
                HermitianMatrix::new(s.clone())?
            }
            Kind::Unitary { .. } => {
                let defect = s.skew_hermitian_defect();
                if defect > HERMITIAN_TOL * (1.0 + s.max_abs()) {
                    return Err(GeometryError::Invalid(format!(
                        "unitary directions must be skew-Hermitian (defect {defect:e})"
                    )));
                }
                HermitianMatrix::hermitian_part(&s.scale_complex(Complex64::new(0.0, -1.0)))
            }
        };
        let norm2 = h.trace_norm_sqr();
        if (norm2 - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::Invalid(format!(
                "direction must have unit norm, got {norm2}"
            )));
        }
        let mut sigma = eigvals_hermitian(&h)?;
        sigma.reverse();
        Ok(Self { s, sigma })
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    /// Eigenvalues `ς`, descending.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Half-gaps `κᵢⱼ = (ςᵢ − ςⱼ)/2 ≥ 0` over `i < j`.
    pub fn kappa_pairs(&self) -> impl Iterator<Item = f64> + '_ {
        kappa_pairs(&self.sigma)
    }

    /// `maxᵢⱼ κᵢⱼ`, zero for `N = 1`.
    pub fn max_kappa(&self) -> f64 {
        match (self.sigma.first(), self.sigma.last()) {
            (Some(a), Some(b)) => 0.5 * (a - b),
            _ => 0.0,
        }
    }

    /// Largest `|ςᵢ|`.
    pub fn max_abs_sigma(&self) -> f64 {
        self.sigma.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

pub(crate) fn kappa_pairs(sigma: &[f64]) -> impl Iterator<Item = f64> + '_ {
    sigma
        .iter()
        .enumerate()
        .flat_map(move |(i, &a)| sigma[i + 1..].iter().map(move |&b| 0.5 * (a - b)))
}

fn sort_descending(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Uniform unit tangent direction at the base point.
///
/// Real SPD draws a GOE matrix, complex SPD and `U(N)` a GUE matrix (the
/// latter multiplied by `i`), then normalizes. Quaternion SPD is rejected.
pub fn sample_direction<R: Rng + ?Sized>(
    geom: &GeometrySpec,
    rng: &mut R,
) -> Result<Direction, GeometryError> {
    geom.require_samplable()?;
    let n = geom.rank();
    let h = match geom.kind() {
        Kind::Spd { beta, .. } if beta.as_int() == 1 => goe(n, rng),
        _ => gue(n, rng),
    };
    let norm = h.trace_norm_sqr().sqrt();
    let h = h.scale(1.0 / norm);
    let mut sigma = eigvals_hermitian(&h)?;
    sigma.reverse();
    let s = match geom.kind() {
        Kind::Spd { .. } => h.into_matrix(),
        Kind::Unitary { .. } => h.matrix().scale_complex(Complex64::new(0.0, 1.0)),
    };
    Ok(Direction { s, sigma })
}

fn goe<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let t: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    let m = Matrix::from_fn(n, |i, j| Complex64::new(0.5 * (t[i * n + j] + t[j * n + i]), 0.0));
    HermitianMatrix::hermitian_part(&m)
}

fn gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    let t: Vec<Complex64> = (0..n * n)
        .map(|_| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            Complex64::new(sd * a, sd * b)
        })
        .collect();
    let m = Matrix::from_fn(n, |i, j| 0.5 * (t[i * n + j] + t[j * n + i].conj()));
    HermitianMatrix::hermitian_part(&m)
}

/// `ln|det A(r, s)|`, the log volume density in geodesic spherical
/// coordinates.
///
/// SPD: `(N−1) ln r + β Σᵢ<ⱼ ln(sinh(κᵢⱼ r)/κᵢⱼ)`.
/// `U(N)`: `(N−1) ln r + 2 Σᵢ<ⱼ ln|sin(κᵢⱼ r)/κᵢⱼ|`, which is `−∞` where a
/// factor vanishes.
pub fn log_volume_density(
    geom: &GeometrySpec,
    r: f64,
    dir: &Direction,
) -> Result<f64, GeometryError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeometryError::Domain(format!("distance must be positive, got {r}")));
    }
    if dir.sigma.len() != geom.rank() {
        return Err(GeometryError::Invalid("direction does not match the geometry".into()));
    }
    Ok(log_volume_density_sigma(geom, r, &dir.sigma))
}

/// Unchecked form on a descending eigenvalue vector.
pub(crate) fn log_volume_density_sigma(geom: &GeometrySpec, r: f64, sigma: &[f64]) -> f64 {
    let zero_roots = (sigma.len() as f64 - 1.0) * r.ln();
    let m = geom.pair_multiplicity();
    let pairs: f64 = if geom.is_spd() {
        kappa_pairs(sigma).map(|k| log_sinh_ratio(k, r)).sum()
    } else {
        kappa_pairs(sigma).map(|k| log_abs_sin_ratio(k, r)).sum()
    };
    zero_roots + m * pairs
}
