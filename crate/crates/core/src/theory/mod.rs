//! Normalizing constants, acceptance probabilities and the expected squared
//! distance, plus the Jacobi-equation check of the volume densities.
//!
//! With `Ω_{d−1}` the area of the unit sphere in the tangent space,
//!
//! * `Z = ∫∫ f(r)|det A(r,s)| dr ds`, the target normalizer;
//! * `Z_κ = Ω_{d−1} ∫ f(r)(sinh(κr)/κ)^{d−1} dr`, the general proposal's;
//! * `Π = Z/Z_κ`, the acceptance probability of the general sampler;
//! * `δ = σ³ d ln Z/dσ`, the target's expected squared distance (`α = 2`).

mod constants;
mod mc;
mod ode;

use serde::Serialize;
use thiserror::Error;

use crate::manifold::GeometryError;
use crate::numkern::{ln_gamma_half, NumError};
use crate::radial::RadialError;

pub use constants::{
    delta_of_sigma, log_z_target_spd, pfaffian_matrix, sigma_for_delta, z_kappa, z_sharp,
    z_target_spd, ZMethod,
};
pub use mc::{z_target_mc, McEstimate};
pub use ode::{curvature_spectrum, jacobi_ode_det, rk4_jacobi};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("the closed form needs an even matrix size, got {0}")]
    OddN(usize),
    #[error("no closed form: {0}")]
    UnsupportedClosedForm(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// `Ω_dim = 2π^{(dim+1)/2} / Γ((dim+1)/2)`, the area of the unit
/// `dim`-sphere.
pub fn surface_area(dim: usize) -> f64 {
    log_surface_area(dim).exp()
}

pub fn log_surface_area(dim: usize) -> f64 {
    std::f64::consts::LN_2 + 0.5 * (dim as f64 + 1.0) * std::f64::consts::PI.ln()
        - ln_gamma_half(dim + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Methods {
    pub z: Method,
    pub z_kappa: Method,
    pub delta: Option<Method>,
}

/// Absolute error estimates; zero where the value is closed-form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Errors {
    pub z: f64,
    pub z_kappa: f64,
    pub pi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoryConstants {
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "Z_kappa")]
    pub z_kappa: f64,
    pub pi: f64,
    /// Acceptance probability of the sharp sampler, SPD only.
    pub pi_sharp: Option<f64>,
    pub delta: Option<f64>,
    pub methods: Methods,
    pub errors: Errors,
}

impl TheoryConstants {
    /// Closed forms for real SPD matrices of even size with a Gaussian law.
    pub fn closed_form(n: usize, sigma: f64) -> Result<Self, TheoryError> {
        use crate::manifold::{Beta, GeometrySpec};
        use crate::radial::RadialLaw;
        let geom = GeometrySpec::spd(n, Beta::Real)?;
        let law = RadialLaw::gaussian(sigma)?;
        let z = z_target_spd(n, sigma)?;
        let zk = z_kappa(&geom, &law, ZMethod::ClosedForm)?;
        let zs = z_sharp(&geom, &law)?;
        Ok(Self {
            z,
            z_kappa: zk,
            pi: z / zk,
            pi_sharp: Some(z / zs),
            delta: Some(delta_of_sigma(n, sigma)?),
            methods: Methods {
                z: Method::ClosedForm,
                z_kappa: Method::ClosedForm,
                delta: Some(Method::ClosedForm),
            },
            errors: Errors { z: 0.0, z_kappa: 0.0, pi: 0.0 },
        })
    }

    /// Monte Carlo `Z` on any supported geometry, with the proposal
    /// normalizer by quadrature.
    pub fn monte_carlo(
        geom: &crate::manifold::GeometrySpec,
        law: &crate::radial::RadialLaw,
        sphere_draws: usize,
        seed: u64,
    ) -> Result<Self, TheoryError> {
        let est = z_target_mc(geom, law, sphere_draws, &mut crate::rng::stream(seed, 0))?;
        let zk = z_kappa(geom, law, ZMethod::Quadrature)?;
        let pi_sharp = if geom.is_spd() { Some(est.value / z_sharp(geom, law)?) } else { None };
        Ok(Self {
            z: est.value,
            z_kappa: zk,
            pi: est.value / zk,
            pi_sharp,
            delta: None,
            methods: Methods { z: Method::MonteCarlo, z_kappa: Method::Quadrature, delta: None },
            errors: Errors { z: est.stderr, z_kappa: 0.0, pi: est.stderr / zk },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((surface_area(0) - 2.0).abs() < 1e-15);
        assert!((surface_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((surface_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((surface_area(5) - PI.powi(3)).abs() < 1e-13);
        // Ω₃ = 2π².
        assert!((surface_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
