use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Direction, GeometryError, GeometrySpec, Kind};
use crate::numkern::{
    eigvals_spd, expm_hermitian, expm_i_hermitian, inv_sqrtm_spd, sqrtm_spd,
    unitary_eigen_angles, HermitianMatrix, Matrix, NumError,
};

const UNITARY_TOL: f64 = 1e-10;

/// A point of the manifold: positive-definite Hermitian (SPD) or unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    x: Matrix,
}

/// Matrix interchange format: `im` is omitted for real matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub n: usize,
    pub beta: u32,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl Point {
    /// Validates `x` against the geometry.
    pub fn new(geom: &GeometrySpec, x: Matrix) -> Result<Self, GeometryError> {
        if x.n() != geom.rank() {
            return Err(GeometryError::Invalid(format!(
                "expected a {0}×{0} matrix, got {1}×{1}",
                geom.rank(),
                x.n()
            )));
        }
        match geom.kind() {
            Kind::Spd { beta, .. } => {
                if beta.as_int() == 1 && !x.is_real() {
                    return Err(GeometryError::Invalid("real SPD points must be real".into()));
                }
                let h = HermitianMatrix::new(x).map_err(|_| GeometryError::NotPositiveDefinite)?;
                eigvals_spd(&h).map_err(pd_error)?;
                Ok(Self { x: h.into_matrix() })
            }
            Kind::Unitary { .. } => {
                let defect = x.unitarity_defect();
                if defect > UNITARY_TOL {
                    return Err(GeometryError::NotUnitary(defect));
                }
                Ok(Self { x })
            }
        }
    }

    pub fn identity(n: usize) -> Self {
        Self { x: Matrix::identity(n) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.x
    }

    pub fn into_matrix(self) -> Matrix {
        self.x
    }

    pub fn is_identity(&self) -> bool {
        self.x.max_abs_diff(&Matrix::identity(self.x.n())) == 0.0
    }

    pub fn to_json(&self, geom: &GeometrySpec) -> PointJson {
        matrix_json(geom, &self.x)
    }

    pub fn from_json(geom: &GeometrySpec, json: &PointJson) -> Result<Self, GeometryError> {
        if json.n != geom.rank() || json.beta != geom.beta() {
            return Err(GeometryError::Invalid(format!(
                "point is n={}, β={} but the geometry is n={}, β={}",
                json.n,
                json.beta,
                geom.rank(),
                geom.beta()
            )));
        }
        let x = Matrix::from_parts(&json.re, json.im.as_deref())?;
        Self::new(geom, x)
    }
}

impl Direction {
    pub fn to_json(&self, geom: &GeometrySpec) -> PointJson {
        matrix_json(geom, self.s())
    }
}

fn matrix_json(geom: &GeometrySpec, x: &Matrix) -> PointJson {
    let real = geom.is_spd() && geom.beta() == 1;
    PointJson {
        n: x.n(),
        beta: geom.beta(),
        re: x.real_rows(),
        im: (!real).then(|| x.imag_rows()),
    }
}

fn pd_error(e: NumError) -> GeometryError {
    match e {
        NumError::NotPositiveDefinite(_) => GeometryError::NotPositiveDefinite,
        other => GeometryError::Num(other),
    }
}

/// `Exp_base(r·s)`: `base^{1/2} exp(r s) base^{1/2}` on SPD, `base·exp(r s)`
/// on `U(N)`.
pub fn exp_map(
    geom: &GeometrySpec,
    r: f64,
    dir: &Direction,
    base: &Point,
) -> Result<Point, GeometryError> {
    geom.require_samplable()?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(GeometryError::Domain(format!("distance must be non-negative, got {r}")));
    }
    if dir.s().n() != geom.rank() || base.x.n() != geom.rank() {
        return Err(GeometryError::Invalid("size mismatch between geometry and inputs".into()));
    }
    let x = match geom.kind() {
        Kind::Spd { .. } => {
            let h = HermitianMatrix::hermitian_part(dir.s()).scale(r);
            let e = expm_hermitian(&h)?;
            if base.is_identity() {
                e.into_matrix()
            } else {
                let b = sqrtm_spd(&HermitianMatrix::hermitian_part(&base.x)).map_err(pd_error)?;
                let y = &(b.matrix() * e.matrix()) * b.matrix();
                HermitianMatrix::hermitian_part(&y).into_matrix()
            }
        }
        Kind::Unitary { .. } => {
            let h = HermitianMatrix::hermitian_part(
                &dir.s().scale_complex(Complex64::new(0.0, -1.0)),
            );
            let e = expm_i_hermitian(&h, r)?;
            if base.is_identity() {
                e
            } else {
                &base.x * &e
            }
        }
    };
    Ok(Point { x })
}

/// Riemannian distance.
///
/// SPD: `‖log(x^{−1/2} y x^{−1/2})‖`. `U(N)`: the norm of the eigen-angles
/// of `x†y` taken in `(−π, π]`.
pub fn distance(geom: &GeometrySpec, x: &Point, y: &Point) -> Result<f64, GeometryError> {
    match geom.kind() {
        Kind::Spd { .. } => {
            let xs = HermitianMatrix::new(x.x.clone()).map_err(|_| GeometryError::NotPositiveDefinite)?;
            let ys = HermitianMatrix::new(y.x.clone()).map_err(|_| GeometryError::NotPositiveDefinite)?;
            eigvals_spd(&ys).map_err(pd_error)?;
            let w = inv_sqrtm_spd(&xs).map_err(pd_error)?;
            let m = &(w.matrix() * ys.matrix()) * w.matrix();
            let lambda = eigvals_spd(&HermitianMatrix::hermitian_part(&m)).map_err(pd_error)?;
            Ok(lambda.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
        }
        Kind::Unitary { .. } => {
            for p in [x, y] {
                let defect = p.x.unitarity_defect();
                if defect > UNITARY_TOL {
                    return Err(GeometryError::NotUnitary(defect));
                }
            }
            let w = &x.x.adjoint() * &y.x;
            let angles = unitary_eigen_angles(&w)?;
            Ok(angles.iter().map(|t| t.abs().min(PI).powi(2)).sum::<f64>().sqrt())
        }
    }
}

/// `c(s)`: `+∞` on SPD, `π / maxᵢ|ςᵢ|` on `U(N)`.
pub fn cut_function(geom: &GeometrySpec, dir: &Direction) -> f64 {
    match geom.kind() {
        Kind::Spd { .. } => f64::INFINITY,
        Kind::Unitary { .. } => cut_sigma(dir.sigma()),
    }
}

pub(crate) fn cut_sigma(sigma: &[f64]) -> f64 {
    PI / sigma.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}
