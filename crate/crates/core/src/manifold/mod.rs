//! Geometry of the supported spaces.
//!
//! Two families, both with the base point at the identity:
//!
//! * `SPD(N, β)`: `N × N` positive-definite matrices over the reals (β = 1),
//!   complexes (β = 2) or quaternions (β = 4), with the affine-invariant
//!   metric `⟨u, v⟩ₓ = tr(x⁻¹ u x⁻¹ v)`. Sectional curvatures lie in
//!   `[−1/2, 0]`, so `κ = 1/√2`.
//! * `U(N)` with the trace metric `⟨u, v⟩ = tr(u v†)`. Curvature is
//!   non-negative (`κ = 0`) and the cut locus bounds the spherical
//!   coordinates by `c(s) = π / maxᵢ|ςᵢ|`.
//!
//! A tangent direction `s` is summarized by its eigenvalues `ς` (for `U(N)`,
//! the eigenvalues of `s` are `i·ςᵢ`); the volume density in geodesic
//! spherical coordinates depends on `s` only through the half-gaps
//! `κᵢⱼ = (ςᵢ − ςⱼ)/2`.

mod direction;
mod point;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

use crate::numkern::NumError;

pub use direction::{log_volume_density, sample_direction, Direction};
pub use point::{cut_function, distance, exp_map, Point, PointJson};

pub(crate) use direction::{kappa_pairs as direction_pairs, log_volume_density_sigma};
pub(crate) use point::cut_sigma;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point is not positive definite")]
    NotPositiveDefinite,
    #[error("point is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Field of matrix entries for the SPD family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Beta {
    Real = 1,
    Complex = 2,
    Quaternion = 4,
}

impl Beta {
    pub fn from_int(beta: u32) -> Result<Self, GeometryError> {
        match beta {
            1 => Ok(Beta::Real),
            2 => Ok(Beta::Complex),
            4 => Ok(Beta::Quaternion),
            other => Err(GeometryError::Invalid(format!("β must be 1, 2 or 4, got {other}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        self as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Spd { n: usize, beta: Beta },
    Unitary { n: usize },
}

/// Which manifold, with its dimension and curvature data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometrySpec {
    kind: Kind,
    dim: usize,
}

impl GeometrySpec {
    pub fn spd(n: usize, beta: Beta) -> Result<Self, GeometryError> {
        if n == 0 {
            return Err(GeometryError::Invalid("matrix size must be at least 1".into()));
        }
        let b = beta.as_int() as usize;
        Ok(Self {
            kind: Kind::Spd { n, beta },
            dim: b * n * (n - 1) / 2 + n,
        })
    }

    pub fn unitary(n: usize) -> Result<Self, GeometryError> {
        if n == 0 {
            return Err(GeometryError::Invalid("matrix size must be at least 1".into()));
        }
        Ok(Self {
            kind: Kind::Unitary { n },
            dim: n * n,
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Manifold dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix size `N`, also the rank.
    pub fn rank(&self) -> usize {
        match self.kind {
            Kind::Spd { n, .. } | Kind::Unitary { n } => n,
        }
    }

    pub fn is_spd(&self) -> bool {
        matches!(self.kind, Kind::Spd { .. })
    }

    /// β for the SPD family; `U(N)` tangent vectors are complex, so 2.
    pub fn beta(&self) -> u32 {
        match self.kind {
            Kind::Spd { beta, .. } => beta.as_int(),
            Kind::Unitary { .. } => 2,
        }
    }

    /// Multiplicity of each `κᵢⱼ` in the volume density.
    pub fn pair_multiplicity(&self) -> f64 {
        self.beta() as f64
    }

    /// Curvature bound: sectional curvatures are `≥ −κ²`.
    pub fn kappa(&self) -> f64 {
        match self.kind {
            Kind::Spd { .. } => FRAC_1_SQRT_2,
            Kind::Unitary { .. } => 0.0,
        }
    }

    /// Largest distance from the base point: infinite for SPD, `√N·π` for `U(N)`.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            Kind::Spd { .. } => f64::INFINITY,
            Kind::Unitary { n } => (n as f64).sqrt() * PI,
        }
    }

    pub(crate) fn require_samplable(&self) -> Result<(), GeometryError> {
        match self.kind {
            Kind::Spd { beta: Beta::Quaternion, .. } => Err(GeometryError::Unsupported(
                "quaternion matrices support density evaluation only".into(),
            )),
            _ => Ok(()),
        }
    }
}
